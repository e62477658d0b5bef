"""Measured quantities: access, outcomes, utilization, proxy gaps, score.

Definitions, all computed by exact counting:

* model access ``psi``: fraction of a population whose obstacle magnitude
  is zero or fully alleviated under the policy.
* model outcomes ``eo_violation`` (``omega``): |TPR0 - TPR1| + |FPR0 - FPR1|
  across the two protected groups. Absolute values are used so opposite-sign
  rate gaps cannot cancel into a fake zero. A group with no positives (TPR
  undefined) or no negatives (FPR undefined) raises
  :class:`~equity_audit.errors.UndefinedRateError` rather than defaulting.
* model utilization ``zeta``: among individuals the deployed model accepted,
  the fraction the evaluation model also marks positive.
* feature gap ``gamma_x``: per evaluation-model feature, 0 when the deployed
  model reads a feature of the same (normalized) name, 1 otherwise.
* label gap ``gamma_l``: per evaluation-model feature, the importance
  difference when the feature is name-matched with agreeing sign, and the
  evaluation model's own importance otherwise.
* obstacle gap: a descriptive pair (how many evaluation-side affected
  features have no name match among deployed-side affected features, plus
  the L1 distance of the constraint weights on name-matched features). It
  is reported, never folded into the score.
* equity score: ``psi + (1 - min(omega, 1)) + zeta`` in [0, 3]; 3 exactly at
  the perfect point psi=1, omega=0, zeta=1.

All reports are immutable values with a ``to_dict`` for JSON emission.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .core import ObstacleModel, Policy, Population, apply_policy, obstacle_magnitude
from .errors import NoPositivesError, UndefinedRateError, ValidationError

DEFAULT_OUTCOME_EPSILON = 1e-9


@dataclass(frozen=True)
class AccessReport:
    psi: float
    per_individual: tuple[bool, ...]
    per_group: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "psi": self.psi,
            "per_individual": [bool(v) for v in self.per_individual],
            "per_group": {str(k): v for k, v in sorted(self.per_group.items())},
        }


@dataclass(frozen=True)
class OutcomeReport:
    eo_violation: float
    tpr_by_group: dict[int, float]
    fpr_by_group: dict[int, float]
    equal_outcomes: bool

    def to_dict(self) -> dict:
        return {
            "eo_violation": self.eo_violation,
            "tpr_by_group": {str(k): v for k, v in sorted(self.tpr_by_group.items())},
            "fpr_by_group": {str(k): v for k, v in sorted(self.fpr_by_group.items())},
            "equal_outcomes": self.equal_outcomes,
        }


@dataclass(frozen=True)
class EvaluationRecord:
    """One accepted individual and what the evaluation model said later."""

    id: str
    y_pt: int
    y_tt: int
    grp: int


@dataclass(frozen=True)
class UtilizationReport:
    zeta: float
    m: int
    true_positive_share: float
    false_positive_share: float
    per_group_fp_share: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "zeta": self.zeta,
            "m": self.m,
            "true_positive_share": self.true_positive_share,
            "false_positive_share": self.false_positive_share,
            "per_group_fp_share": {
                str(k): v for k, v in sorted(self.per_group_fp_share.items())
            },
        }


@dataclass(frozen=True)
class ObstacleGap:
    unmatched_affected_features: int
    alpha_l1_distance_on_matched: float

    def to_dict(self) -> dict:
        return {
            "unmatched_affected_features": self.unmatched_affected_features,
            "alpha_l1_distance_on_matched": self.alpha_l1_distance_on_matched,
        }


@dataclass(frozen=True)
class GapReport:
    gamma_x: tuple[int, ...]
    gamma_l: tuple[float, ...]
    obstacle_gap: ObstacleGap | None = None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "gamma_x": list(self.gamma_x),
            "gamma_l": list(self.gamma_l),
            "obstacle_gap": None if self.obstacle_gap is None else self.obstacle_gap.to_dict(),
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class EquityReport:
    access: AccessReport
    outcome: OutcomeReport
    utilization: UtilizationReport
    gaps: GapReport | None
    score: float

    @classmethod
    def from_reports(
        cls,
        access: AccessReport,
        outcome: OutcomeReport,
        utilization: UtilizationReport,
        gaps: GapReport | None = None,
    ) -> "EquityReport":
        return cls(
            access=access,
            outcome=outcome,
            utilization=utilization,
            gaps=gaps,
            score=equity_score(access, outcome, utilization),
        )

    def to_dict(self) -> dict:
        return {
            "access": self.access.to_dict(),
            "outcome": self.outcome.to_dict(),
            "utilization": self.utilization.to_dict(),
            "gaps": None if self.gaps is None else self.gaps.to_dict(),
            "score": self.score,
        }


def model_access(pop: Population, om: ObstacleModel, policy: Policy) -> AccessReport:
    """Fraction of the population with zero or fully alleviated obstacles."""
    if len(pop) == 0:
        raise ValidationError("model_access requires a nonempty population")
    flags = []
    for ind in pop.individuals:
        residual = apply_policy(obstacle_magnitude(om, ind), policy)
        flags.append(residual == 0.0)
    flags_arr = np.array(flags, dtype=bool)
    groups = pop.groups()
    per_group = {
        int(g): float(np.mean(flags_arr[groups == g])) for g in np.unique(groups)
    }
    return AccessReport(
        psi=float(np.mean(flags_arr)),
        per_individual=tuple(bool(v) for v in flags),
        per_group=per_group,
    )


def eo_violation(
    preds, labels, groups, epsilon: float = DEFAULT_OUTCOME_EPSILON
) -> OutcomeReport:
    """Equalized-odds violation |dTPR| + |dFPR| between groups 0 and 1."""
    p = np.asarray(preds, dtype=int)
    y = np.asarray(labels, dtype=int)
    g = np.asarray(groups, dtype=int)
    if not (p.shape == y.shape == g.shape) or p.ndim != 1:
        raise ValidationError("preds, labels and groups must be equal-length vectors")
    if not np.all(np.isin(p, (0, 1))) or not np.all(np.isin(y, (0, 1))):
        raise ValidationError("preds and labels must be binary (0/1)")
    present = sorted(int(v) for v in np.unique(g))
    if present != [0, 1]:
        raise ValidationError(f"both groups 0 and 1 must be present, got {present}")

    tpr: dict[int, float] = {}
    fpr: dict[int, float] = {}
    for grp in (0, 1):
        mask = g == grp
        pos = mask & (y == 1)
        neg = mask & (y == 0)
        if not np.any(pos):
            raise UndefinedRateError(grp, "tpr")
        if not np.any(neg):
            raise UndefinedRateError(grp, "fpr")
        tpr[grp] = float(np.mean(p[pos]))
        fpr[grp] = float(np.mean(p[neg]))

    omega = abs(tpr[0] - tpr[1]) + abs(fpr[0] - fpr[1])
    return OutcomeReport(
        eo_violation=omega,
        tpr_by_group=tpr,
        fpr_by_group=fpr,
        equal_outcomes=omega <= epsilon,
    )


def utilization(records: list[EvaluationRecord]) -> UtilizationReport:
    """Share of accepted individuals confirmed positive by the evaluation model."""
    if len(records) == 0:
        raise NoPositivesError(
            "utilization is undefined: no proxy-positive records (m = 0)"
        )
    for rec in records:
        if rec.y_pt != 1:
            raise ValidationError(
                f"record {rec.id!r} has y_pt={rec.y_pt}; utilization is computed "
                "over proxy-positives only"
            )
        if rec.y_tt not in (0, 1):
            raise ValidationError(f"record {rec.id!r} has non-binary y_tt")
    m = len(records)
    agree = sum(1 for rec in records if rec.y_tt == rec.y_pt)
    zeta = agree / m
    fp_records = [rec for rec in records if rec.y_tt == 0]
    groups = sorted({rec.grp for rec in records})
    if fp_records:
        per_group_fp = {
            g: sum(1 for rec in fp_records if rec.grp == g) / len(fp_records)
            for g in groups
        }
    else:
        per_group_fp = {g: 0.0 for g in groups}
    return UtilizationReport(
        zeta=zeta,
        m=m,
        true_positive_share=agree / m,
        false_positive_share=len(fp_records) / m,
        per_group_fp_share=per_group_fp,
    )


_NAME_SQUASH = re.compile(r"[\s_]+")


def normalize_feature_name(name: str) -> str:
    """Canonical form used for feature-name equivalence.

    Case-insensitive; runs of whitespace and underscores collapse to one
    separator, so "Test_Scores" and "test scores" are the same feature.
    """
    return _NAME_SQUASH.sub(" ", name.strip()).lower()


def match_features(
    proxy_features: list[str], intended_features: list[str]
) -> dict[int, int | None]:
    """Map each evaluation-feature index to a deployed-feature index.

    Matching is exact on normalized names; unmatched indices map to None.
    Raises on duplicate evaluation-feature names (the gap would be
    ambiguous).
    """
    if not intended_features:
        raise ValidationError("intended feature list must be nonempty")
    normalized_intended = [normalize_feature_name(f) for f in intended_features]
    if len(set(normalized_intended)) != len(normalized_intended):
        raise ValidationError("intended feature names must be unique after normalization")
    proxy_index = {}
    for j, name in enumerate(proxy_features):
        proxy_index.setdefault(normalize_feature_name(name), j)
    return {
        i: proxy_index.get(norm) for i, norm in enumerate(normalized_intended)
    }


def feature_proxy_gap(
    proxy_features: list[str], intended_features: list[str]
) -> np.ndarray:
    """Binary vector over evaluation features: 1 where no name match exists."""
    matching = match_features(proxy_features, intended_features)
    return np.array(
        [0 if matching[i] is not None else 1 for i in range(len(intended_features))],
        dtype=int,
    )


def label_proxy_gap(omega_p, omega_t, matching: dict[int, int | None]) -> np.ndarray:
    """Signed importance gap per evaluation feature.

    A name-matched feature whose importances agree in sign contributes the
    difference ``omega_t[i] - omega_p[j]``; every other feature contributes
    ``omega_t[i]`` unchanged.
    """
    wp = np.asarray(omega_p, dtype=float)
    wt = np.asarray(omega_t, dtype=float)
    for vec, name in ((wp, "omega_p"), (wt, "omega_t")):
        total = float(np.sum(np.abs(vec)))
        if total != 0.0 and abs(total - 1.0) > 1e-6:
            raise ValidationError(
                f"{name} must be L1-normalized or all-zero (sum |w| = {total:.6g})"
            )
    out = np.empty(wt.shape[0], dtype=float)
    for i in range(wt.shape[0]):
        j = matching.get(i)
        if j is not None:
            if not 0 <= j < wp.shape[0]:
                raise ValidationError(f"matching index {j} out of range for omega_p")
            if np.sign(wt[i]) == np.sign(wp[j]):
                out[i] = wt[i] - wp[j]
                continue
        out[i] = wt[i]
    return out


LABEL_GAP_NOTE = (
    "gamma_l[i] is omega_t[i] - omega_p[j] when evaluation feature i "
    "name-matches deployed feature j and the importances share a sign; "
    "otherwise gamma_l[i] copies omega_t[i] verbatim."
)


def compute_gap_report(
    proxy_features: list[str],
    intended_features: list[str],
    omega_p,
    omega_t,
    om_proxy: ObstacleModel | None = None,
    om_intended: ObstacleModel | None = None,
) -> GapReport:
    """Bundle feature gap, label gap and (optionally) the obstacle gap."""
    matching = match_features(proxy_features, intended_features)
    gx = feature_proxy_gap(proxy_features, intended_features)
    gl = label_proxy_gap(omega_p, omega_t, matching)
    og = None
    if om_proxy is not None and om_intended is not None:
        og = obstacle_gap(om_proxy, proxy_features, om_intended, intended_features)
    return GapReport(
        gamma_x=tuple(int(v) for v in gx),
        gamma_l=tuple(float(v) for v in gl),
        obstacle_gap=og,
        notes=(LABEL_GAP_NOTE,),
    )


def obstacle_gap(
    om_proxy: ObstacleModel,
    proxy_features: list[str],
    om_intended: ObstacleModel,
    intended_features: list[str],
) -> ObstacleGap:
    """Descriptive distance between utilization and access obstacles.

    Counts evaluation-side affected features whose names have no match among
    deployed-side affected features, and sums |alpha_t - alpha_p| over all
    name-matched features. Larger values mean the two obstacle structures
    disagree more.
    """
    if om_proxy.alpha.shape[0] != len(proxy_features):
        raise ValidationError("proxy obstacle model does not match its feature list")
    if om_intended.alpha.shape[0] != len(intended_features):
        raise ValidationError("intended obstacle model does not match its feature list")
    matching = match_features(proxy_features, intended_features)
    proxy_affected_names = {
        normalize_feature_name(proxy_features[j]) for j in om_proxy.affected_features
    }
    unmatched = sum(
        1
        for i in om_intended.affected_features
        if normalize_feature_name(intended_features[i]) not in proxy_affected_names
    )
    l1 = 0.0
    for i, j in matching.items():
        if j is not None:
            l1 += abs(float(om_intended.alpha[i]) - float(om_proxy.alpha[j]))
    return ObstacleGap(unmatched_affected_features=int(unmatched), alpha_l1_distance_on_matched=l1)


def equity_score(
    access: AccessReport, outcome: OutcomeReport, util: UtilizationReport
) -> float:
    """Composite score ``psi + (1 - min(omega, 1)) + zeta`` in [0, 3]."""
    return float(
        access.psi + (1.0 - min(outcome.eo_violation, 1.0)) + util.zeta
    )
