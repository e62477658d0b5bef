"""Gated equity scoring over candidate model spaces.

The search walks three gates in a fixed order, re-sampling candidates when
a gate fails:

1. access: draw a (spec, policy) pair for the deployed model and compute
   the access rate psi on the spec's feature view; below ``tau`` the pair
   is rejected and the outer iteration restarts with a fresh draw.
2. outcome: train the deployed model on a seeded 70/30 split of revealed
   rows, score the equalized-odds violation omega on the held-out rows,
   and re-sample just the model function while omega exceeds ``tau_o``.
3. utilization: take the held-out rows the deployed model accepted, join
   them by id into the evaluation dataset, reveal their evaluation-side
   features under a sampled evaluation policy, and check that the trained
   evaluation model confirms at least ``tau`` of them. Failing that, the
   whole evaluation configuration (features, policy, function) re-samples.

Every candidate evaluation appends one trace record, so a finished
:class:`ScoringTrace` is a complete audit log of what was tried, in which
phase, and why it was rejected. A global budget of
``max_outer_iters * max_inner_iters`` candidate evaluations bounds the run;
exhausting it ends the trace with ``terminated_reason="iteration_cap"``.

The evaluation model is fitted on evaluation-dataset rows whose ids are
not currently under evaluation, so accepted individuals are never scored
by a model trained on themselves.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .core import ObstacleModel, Policy, Population, reveal_population
from .errors import JoinError, SingleClassError, UndefinedRateError, ValidationError
from .learner import ModelSpec, predict, train
from .metrics import EvaluationRecord, eo_violation, model_access, utilization

REJECT_ACCESS = "access_gate"
REJECT_OUTCOME = "outcome_gate"
REJECT_UTILIZATION = "utilization_gate"
REJECT_DEGENERATE = "degenerate_metric"

TRACE_CSV_COLUMNS = (
    "iter",
    "spec_id",
    "policy_id",
    "psi",
    "omega",
    "zeta",
    "phase",
    "accepted",
    "reason",
)


@dataclass(frozen=True)
class ModelSpace:
    """A pool of candidate specs and policies over one labeled dataset."""

    candidate_specs: tuple[ModelSpec, ...]
    dataset: Population
    obstacle_model: ObstacleModel
    candidate_policies: tuple[Policy, ...]

    def __post_init__(self):
        object.__setattr__(self, "candidate_specs", tuple(self.candidate_specs))
        object.__setattr__(self, "candidate_policies", tuple(self.candidate_policies))
        if not self.candidate_specs:
            raise ValidationError("model space needs at least one candidate spec")
        if not self.candidate_policies:
            raise ValidationError("model space needs at least one candidate policy")
        for spec in self.candidate_specs:
            missing = [
                f for f in spec.feature_names if f not in self.dataset.feature_names
            ]
            if missing:
                raise ValidationError(
                    f"spec features {missing} not present in the dataset"
                )


@dataclass(frozen=True)
class ScoringConfig:
    tau: float = 0.85
    tau_o: float = 0.15
    max_outer_iters: int = 100
    max_inner_iters: int = 25
    epsilon_outcomes: float = 1e-9
    seed: int = 0
    train_fraction: float = 0.7

    def __post_init__(self):
        if not 0 < self.tau <= 1:
            raise ValidationError("tau must be in (0, 1]")
        if not 0 <= self.tau_o < 1:
            raise ValidationError("tau_o must be in [0, 1)")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ValidationError("iteration caps must be positive")
        if not 0 < self.train_fraction < 1:
            raise ValidationError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    phase: str
    spec_id: int
    policy_id: int
    psi: float | None
    omega: float | None
    zeta: float | None
    accepted: bool
    reason: str

    def to_dict(self) -> dict:
        return {
            "iter": self.iter,
            "phase": self.phase,
            "spec_id": self.spec_id,
            "policy_id": self.policy_id,
            "psi": self.psi,
            "omega": self.omega,
            "zeta": self.zeta,
            "accepted": self.accepted,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class ScoringTrace:
    records: tuple[IterationRecord, ...]
    final_score: float | None
    terminated_reason: str  # "converged" or "iteration_cap"

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "final_score": self.final_score,
            "terminated_reason": self.terminated_reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_CSV_COLUMNS)
        for r in self.records:
            writer.writerow(
                [
                    r.iter,
                    r.spec_id,
                    r.policy_id,
                    "" if r.psi is None else repr(r.psi),
                    "" if r.omega is None else repr(r.omega),
                    "" if r.zeta is None else repr(r.zeta),
                    r.phase,
                    int(r.accepted),
                    r.reason,
                ]
            )
        return buf.getvalue()


class CandidateSampler:
    """Without-replacement cyclic sampler over a model space.

    Specs and policies are drawn from independent shuffled streams; a
    stream reshuffles once exhausted. :meth:`reset` starts a fresh
    without-replacement window (one per outer search iteration).
    """

    def __init__(self, space: ModelSpace, rng: np.random.Generator):
        self._space = space
        self._rng = rng
        self._spec_queue: list[int] = []
        self._policy_queue: list[int] = []

    def reset(self) -> None:
        self._spec_queue = []
        self._policy_queue = []

    def _next(self, queue: list[int], size: int) -> int:
        if not queue:
            queue.extend(self._rng.permutation(size).tolist())
        return queue.pop(0)

    def next_spec(self) -> int:
        return self._next(self._spec_queue, len(self._space.candidate_specs))

    def next_policy(self) -> int:
        return self._next(self._policy_queue, len(self._space.candidate_policies))

    def sample(self) -> tuple[int, int]:
        return self.next_spec(), self.next_policy()


def sample_candidate(
    space: ModelSpace, rng_state: "CandidateSampler | np.random.Generator"
) -> tuple[ModelSpec, Policy]:
    """Draw one (spec, policy) candidate.

    Passing a :class:`CandidateSampler` keeps the without-replacement state
    across calls; passing a bare generator wraps it in a fresh sampler for a
    single draw.
    """
    sampler = (
        rng_state
        if isinstance(rng_state, CandidateSampler)
        else CandidateSampler(space, rng_state)
    )
    spec_id, policy_id = sampler.sample()
    return space.candidate_specs[spec_id], space.candidate_policies[policy_id]


def _spec_view(space: ModelSpace, spec: ModelSpec) -> tuple[Population, ObstacleModel]:
    """Restrict the dataset and obstacle model to the spec's features."""
    indices = [space.dataset.feature_names.index(f) for f in spec.feature_names]
    return space.dataset.restrict(spec.feature_names), space.obstacle_model.restrict(indices)


def _split_indices(
    n: int, train_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng([seed, 17])
    perm = rng.permutation(n)
    n_train = max(1, min(n - 1, int(round(train_fraction * n))))
    return perm[:n_train], perm[n_train:]


def run_equity_scoring(
    proxy_space: ModelSpace, intended_space: ModelSpace, cfg: ScoringConfig
) -> ScoringTrace:
    """Search the two spaces for a configuration that clears all gates.

    Returns a trace of every candidate evaluation. On convergence the final
    score is ``psi + (1 - min(omega, 1)) + zeta`` for the accepted
    configuration; if no configuration clears all three gates inside the
    evaluation budget, the trace ends with ``iteration_cap`` and no score.
    """
    if len(proxy_space.dataset) < 2:
        raise ValidationError("proxy dataset needs at least 2 rows")
    rng = np.random.default_rng([cfg.seed, 29])
    proxy_sampler = CandidateSampler(proxy_space, rng)
    intended_sampler = CandidateSampler(intended_space, rng)

    n = len(proxy_space.dataset)
    train_idx, test_idx = _split_indices(n, cfg.train_fraction, cfg.seed)
    proxy_ids = proxy_space.dataset.ids()
    intended_ids = {ind_id: row for row, ind_id in enumerate(intended_space.dataset.ids())}

    records: list[IterationRecord] = []
    budget = cfg.max_outer_iters * cfg.max_inner_iters

    def spent() -> bool:
        return budget <= 0

    for outer in range(1, cfg.max_outer_iters + 1):
        if spent():
            break
        proxy_sampler.reset()
        intended_sampler.reset()

        spec_id, policy_id = proxy_sampler.sample()
        spec = proxy_space.candidate_specs[spec_id]
        policy = proxy_space.candidate_policies[policy_id]
        view, view_om = _spec_view(proxy_space, spec)

        budget -= 1
        psi = model_access(view, view_om, policy).psi
        if psi < cfg.tau:
            records.append(
                IterationRecord(outer, "access", spec_id, policy_id, psi, None, None, False, REJECT_ACCESS)
            )
            continue
        records.append(
            IterationRecord(outer, "access", spec_id, policy_id, psi, None, None, True, "")
        )

        # outcome phase: re-sample the model function while omega > tau_o.
        # A re-sampled spec may read different features, so its access rate
        # is re-checked; a spec that breaks the access gate is rejected
        # within this phase.
        x_rev, y_rev, _ = reveal_population(view, view_om, policy)
        groups = view.groups()
        accepted_omega = None
        preds_test = None
        fresh_spec = False
        for _ in range(cfg.max_inner_iters):
            if spent():
                break
            budget -= 1
            if fresh_spec:
                psi = model_access(view, view_om, policy).psi
                if psi < cfg.tau:
                    records.append(
                        IterationRecord(outer, "outcome", spec_id, policy_id, psi, None, None, False, REJECT_ACCESS)
                    )
                    spec_id = proxy_sampler.next_spec()
                    spec = proxy_space.candidate_specs[spec_id]
                    view, view_om = _spec_view(proxy_space, spec)
                    x_rev, y_rev, _ = reveal_population(view, view_om, policy)
                    continue
            try:
                model = train(spec, x_rev[train_idx], y_rev[train_idx], cfg.seed)
                preds = np.asarray(predict(model, x_rev[test_idx]))
                report = eo_violation(
                    preds, y_rev[test_idx], groups[test_idx], cfg.epsilon_outcomes
                )
            except (SingleClassError, UndefinedRateError):
                records.append(
                    IterationRecord(outer, "outcome", spec_id, policy_id, psi, None, None, False, REJECT_DEGENERATE)
                )
                spec_id = proxy_sampler.next_spec()
                spec = proxy_space.candidate_specs[spec_id]
                view, view_om = _spec_view(proxy_space, spec)
                x_rev, y_rev, _ = reveal_population(view, view_om, policy)
                fresh_spec = True
                continue
            omega = report.eo_violation
            if omega <= cfg.tau_o:
                accepted_omega = omega
                preds_test = preds
                records.append(
                    IterationRecord(outer, "outcome", spec_id, policy_id, psi, omega, None, True, "")
                )
                break
            records.append(
                IterationRecord(outer, "outcome", spec_id, policy_id, psi, omega, None, False, REJECT_OUTCOME)
            )
            spec_id = proxy_sampler.next_spec()
            spec = proxy_space.candidate_specs[spec_id]
            view, view_om = _spec_view(proxy_space, spec)
            x_rev, y_rev, _ = reveal_population(view, view_om, policy)
            fresh_spec = True
        if accepted_omega is None:
            continue

        # utilization phase on the accepted model's held-out positives
        positive_rows = test_idx[np.asarray(preds_test) == 1]
        if positive_rows.size == 0:
            records.append(
                IterationRecord(outer, "utilization", spec_id, policy_id, psi, accepted_omega, None, False, REJECT_DEGENERATE)
            )
            continue
        b_ids = [proxy_ids[int(row)] for row in positive_rows]
        missing = [ind_id for ind_id in b_ids if ind_id not in intended_ids]
        if missing:
            raise JoinError(
                f"{len(missing)} accepted ids missing from the evaluation dataset "
                f"(first: {missing[0]!r})"
            )
        b_groups = groups[positive_rows]

        converged_zeta = None
        for _ in range(cfg.max_inner_iters):
            if spent():
                break
            ispec_id, ipolicy_id = intended_sampler.sample()
            ispec = intended_space.candidate_specs[ispec_id]
            ipolicy = intended_space.candidate_policies[ipolicy_id]
            iview, iview_om = _spec_view(intended_space, ispec)
            ix_rev, iy_rev, _ = reveal_population(iview, iview_om, ipolicy)

            b_rows = np.array([intended_ids[ind_id] for ind_id in b_ids], dtype=int)
            fit_mask = np.ones(len(iview), dtype=bool)
            fit_mask[b_rows] = False

            budget -= 1
            try:
                imodel = train(ispec, ix_rev[fit_mask], iy_rev[fit_mask], cfg.seed)
            except (SingleClassError, ValidationError):
                records.append(
                    IterationRecord(outer, "utilization", ispec_id, ipolicy_id, psi, accepted_omega, None, False, REJECT_DEGENERATE)
                )
                continue
            y_tt = np.asarray(predict(imodel, ix_rev[b_rows]))
            evaluation = [
                EvaluationRecord(id=b_ids[k], y_pt=1, y_tt=int(y_tt[k]), grp=int(b_groups[k]))
                for k in range(len(b_ids))
            ]
            zeta = utilization(evaluation).zeta
            if zeta >= cfg.tau:
                converged_zeta = zeta
                records.append(
                    IterationRecord(outer, "utilization", ispec_id, ipolicy_id, psi, accepted_omega, zeta, True, "")
                )
                break
            records.append(
                IterationRecord(outer, "utilization", ispec_id, ipolicy_id, psi, accepted_omega, zeta, False, REJECT_UTILIZATION)
            )
        if converged_zeta is None:
            continue

        score = psi + (1.0 - min(accepted_omega, 1.0)) + converged_zeta
        return ScoringTrace(tuple(records), float(score), "converged")

    return ScoringTrace(tuple(records), None, "iteration_cap")
