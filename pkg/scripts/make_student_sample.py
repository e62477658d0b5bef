#!/usr/bin/env python3
"""Generate the bundled student-performance sample file.

Produces a semicolon-delimited CSV with the same 33-column schema, value
ranges and quoting style as the public student-performance data (math
course, 395 rows). Values are drawn from a seeded generative model in
which family background drives both study habits and grades, so the
pipeline's derived views behave like they would on the real file. Run
from the repo root:

    python scripts/make_student_sample.py tests/data/student_sample.csv
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

N_ROWS = 395
SEED = 20240915

COLUMNS = [
    "school", "sex", "age", "address", "famsize", "Pstatus", "Medu", "Fedu",
    "Mjob", "Fjob", "reason", "guardian", "traveltime", "studytime",
    "failures", "schoolsup", "famsup", "paid", "activities", "nursery",
    "higher", "internet", "romantic", "famrel", "freetime", "goout", "Dalc",
    "Walc", "health", "absences", "G1", "G2", "G3",
]

STR_COLUMNS = {
    "school", "sex", "address", "famsize", "Pstatus", "Mjob", "Fjob",
    "reason", "guardian", "schoolsup", "famsup", "paid", "activities",
    "nursery", "higher", "internet", "romantic",
}


def _ordinal(values: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Map a continuous score to equal-quantile ordinal levels lo..hi."""
    ranks = values.argsort().argsort() / (len(values) - 1)
    return (lo + np.floor(ranks * (hi - lo + 1)).clip(0, hi - lo)).astype(int)


def generate(seed: int = SEED, n: int = N_ROWS) -> list[dict]:
    rng = np.random.default_rng(seed)

    # latents: ability, family support (correlated), study habits built
    # from support plus an own component
    ability = rng.normal(size=n)
    support = 0.55 * ability + 0.84 * rng.normal(size=n)
    habits = 0.65 * support + 0.25 * ability + 0.70 * rng.normal(size=n)

    sex = np.where(rng.random(n) < 0.53, "F", "M")
    # mild group skew in support, so derived obstacle flags differ by sex
    support = support - 0.35 * (sex == "F")

    medu = _ordinal(support + 0.3 * rng.normal(size=n), 0, 4)
    fedu = _ordinal(support + 0.4 * rng.normal(size=n), 0, 4)
    famrel = _ordinal(support + 0.8 * rng.normal(size=n), 1, 5)
    paid = np.where(support + 0.6 * rng.normal(size=n) > 0.1, "yes", "no")

    job_levels = np.array(["at_home", "other", "services", "health", "teacher"])
    mjob = job_levels[_ordinal(support + 0.7 * rng.normal(size=n), 0, 4)]
    fjob = job_levels[_ordinal(support + 0.9 * rng.normal(size=n), 0, 4)]

    studytime = _ordinal(habits + 0.3 * rng.normal(size=n), 1, 4)
    health = _ordinal(0.6 * habits + 0.8 * rng.normal(size=n), 1, 5)
    freetime = _ordinal(0.4 * habits + 0.9 * rng.normal(size=n), 1, 5)
    absences = np.round(
        np.exp(1.35 - 0.9 * habits + 0.55 * rng.normal(size=n))
    ).astype(int).clip(0, 93)
    traveltime = _ordinal(-support + 0.8 * rng.normal(size=n), 1, 4)
    goout = _ordinal(-0.3 * habits + 0.9 * rng.normal(size=n), 1, 5)
    dalc = _ordinal(-0.4 * habits + 0.9 * rng.normal(size=n), 1, 5)
    walc = _ordinal(-0.3 * habits + 0.4 * (goout - 3) + 0.8 * rng.normal(size=n), 1, 5)

    # grades: habit/health/absence terms dominate so the evaluation-side
    # view keeps real predictive power; ability adds the rest. Period
    # grades are noisy snapshots of the same core.
    absence_penalty = np.log1p(absences) - np.mean(np.log1p(absences))
    g3_core = (
        10.3
        + 2.2 * (studytime - 2.5)
        + 1.2 * (health - 3.0) / 1.2
        - 1.9 * absence_penalty
        + 0.9 * (freetime - 3.0) / 1.2
        + 0.3 * (medu - 2.0)
        + 0.55 * ability
    )
    g3 = np.round(g3_core + rng.normal(scale=1.1, size=n)).astype(int).clip(0, 20)
    g1 = np.round(g3_core - 0.4 + rng.normal(scale=2.1, size=n)).astype(int).clip(0, 20)
    g2 = np.round(0.25 * g1 + 0.75 * g3_core + rng.normal(scale=1.6, size=n)).astype(int).clip(0, 20)

    failures = np.where(
        g3_core + rng.normal(scale=1.5, size=n) < 6.5,
        rng.integers(1, 4, size=n),
        0,
    )

    rows = []
    for i in range(n):
        rows.append(
            {
                "school": "GP" if rng.random() < 0.88 else "MS",
                "sex": sex[i],
                "age": int(rng.integers(15, 20)),
                "address": "U" if support[i] + rng.normal() * 0.8 > -0.4 else "R",
                "famsize": "GT3" if rng.random() < 0.71 else "LE3",
                "Pstatus": "T" if rng.random() < 0.9 else "A",
                "Medu": int(medu[i]),
                "Fedu": int(fedu[i]),
                "Mjob": mjob[i],
                "Fjob": fjob[i],
                "reason": rng.choice(["course", "home", "reputation", "other"]),
                "guardian": rng.choice(["mother", "father", "other"], p=[0.69, 0.23, 0.08]),
                "traveltime": int(traveltime[i]),
                "studytime": int(studytime[i]),
                "failures": int(failures[i]),
                "schoolsup": "yes" if rng.random() < 0.13 else "no",
                "famsup": "yes" if rng.random() < 0.61 else "no",
                "paid": paid[i],
                "activities": "yes" if rng.random() < 0.5 else "no",
                "nursery": "yes" if rng.random() < 0.79 else "no",
                "higher": "yes" if rng.random() < 0.95 else "no",
                "internet": "yes" if rng.random() < 0.83 else "no",
                "romantic": "yes" if rng.random() < 0.33 else "no",
                "famrel": int(famrel[i]),
                "freetime": int(freetime[i]),
                "goout": int(goout[i]),
                "Dalc": int(dalc[i]),
                "Walc": int(walc[i]),
                "health": int(health[i]),
                "absences": int(absences[i]),
                "G1": int(g1[i]),
                "G2": int(g2[i]),
                "G3": int(g3[i]),
            }
        )
    return rows


def write_csv(rows: list[dict], path: Path) -> None:
    # no field ever contains a ';', so plain joins reproduce the upstream
    # quoting style (quoted strings, bare numbers) exactly
    lines = [";".join(f'"{c}"' for c in COLUMNS)]
    for row in rows:
        lines.append(
            ";".join(
                f'"{row[c]}"' if c in STR_COLUMNS else str(row[c]) for c in COLUMNS
            )
        )
    path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("tests/data/student_sample.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(generate(), out)
    print(f"wrote {N_ROWS} rows to {out}")
