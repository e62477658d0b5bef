import numpy as np
import pytest

from equity_audit.core import dominates
from equity_audit.errors import ValidationError
from equity_audit.loopsim import (
    CuratedDataset,
    SyntheticConfig,
    curate_ground_truth,
    default_config,
    generate_cohort,
    generate_population,
    run_inequity_loop,
    trajectory_to_csv,
)


def small_config(seed=42, **overrides) -> SyntheticConfig:
    base = default_config(seed=seed).__dict__ | {"n_per_round": 400} | overrides
    return SyntheticConfig(**base)


_LOOP_RUNS: dict = {}


def loop_run(regime: str):
    """Default-config 10-round run at seed 42, computed once per session."""
    if regime not in _LOOP_RUNS:
        _LOOP_RUNS[regime] = run_inequity_loop(default_config(seed=42), 10, regime)
    return _LOOP_RUNS[regime]


class TestGeneratePopulation:
    def test_no_obstacle_world(self):
        cfg = small_config(obstacle_prob_by_group={0: 0.0, 1: 0.0})
        pop = generate_population(cfg, 1)
        for ind in pop.individuals:
            assert np.array_equal(ind.x, ind.z)
            assert ind.y == ind.y_prime

    def test_group_fraction_concentrates(self):
        cfg = small_config(n_per_round=10000)
        pop = generate_population(cfg, 0)
        share = np.mean(pop.groups())
        assert 0.48 <= share <= 0.52

    def test_deterministic_per_seed_and_round(self):
        cfg = small_config()
        p1 = generate_population(cfg, 3)
        p2 = generate_population(cfg, 3)
        assert np.array_equal(p1.x_matrix(), p2.x_matrix())
        assert np.array_equal(p1.z_matrix(), p2.z_matrix())
        assert np.array_equal(p1.labels(), p2.labels())
        p3 = generate_population(cfg, 4)
        assert not np.array_equal(p1.x_matrix(), p3.x_matrix())

    def test_dominance_for_flagged_individuals(self):
        cfg = small_config()
        cohort = generate_cohort(cfg, 2)
        for view in (cohort.proxy, cohort.intended):
            for ind, flagged in zip(view.individuals, cohort.obstacle_flags):
                if flagged:
                    assert dominates(ind.z, ind.x)
                else:
                    assert np.array_equal(ind.z, ind.x)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            small_config(group_fraction=0.0)
        with pytest.raises(ValidationError):
            small_config(label_noise=0.7)
        with pytest.raises(ValidationError):
            small_config(alpha_proxy=(0.0, 0.0, 0.0))


class TestCurateGroundTruth:
    def test_cardinality_and_labels(self):
        batch = curate_ground_truth(
            [(f"i{k}", np.array([1.0, 2.0]), 1) for k in range(4)], round=2
        )
        assert len(batch) == 4
        assert batch.y.tolist() == [1, 1, 1, 1]
        assert batch.rounds.tolist() == [2, 2, 2, 2]

    def test_negative_outcome_recorded_despite_acceptance(self):
        batch = curate_ground_truth([("i0", np.array([5.0]), 0)], round=1)
        assert batch.y.tolist() == [0]

    def test_provenance_survives_concatenation(self):
        merged = CuratedDataset.empty(("a",))
        for r in (1, 2, 3):
            merged = merged.concat(
                curate_ground_truth(
                    [(f"r{r}i{k}", np.array([float(k)]), 1) for k in range(r)],
                    round=r,
                    feature_names=("a",),
                )
            )
        assert len(merged) == 6
        assert np.bincount(merged.rounds)[1:].tolist() == [1, 2, 3]
        assert len(set(merged.source_ids)) == 6

    def test_empty_batch(self):
        batch = curate_ground_truth([], round=1, feature_names=("a",))
        assert len(batch) == 0


class TestRunInequityLoop:
    def test_single_round_trajectory(self):
        traj, _ = run_inequity_loop(small_config(), 1, "no_equity")
        assert len(traj.rounds) == 1
        assert traj.rounds[0].round == 1

    def test_unknown_regime_rejected(self):
        with pytest.raises(ValidationError):
            run_inequity_loop(small_config(), 1, "sideways")

    def test_conservation_of_curated_rows(self):
        cfg = small_config()
        traj, curated = run_inequity_loop(cfg, 3, "access_only")
        per_round = np.bincount(curated.rounds, minlength=4)
        for r, record in enumerate(traj.rounds, start=1):
            assert record.curated_size == traj.seed_size + per_round[1 : r + 1].sum()

    def test_selective_labeling_sources(self):
        cfg = small_config()
        _, curated = run_inequity_loop(cfg, 3, "no_equity")
        assert len(set(curated.source_ids)) == len(curated)
        for r in (1, 2, 3):
            cohort_ids = set(generate_cohort(cfg, r).proxy.ids())
            batch_ids = {
                sid for sid, rnd in zip(curated.source_ids, curated.rounds) if rnd == r
            }
            assert batch_ids <= cohort_ids

    def test_single_class_seed_skips_rounds(self):
        cfg = small_config(
            n_per_round=50,
            obstacle_prob_by_group={0: 0.0, 1: 0.0},
            true_model_coefficients=((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
            label_noise=0.0,
        )
        traj, curated = run_inequity_loop(cfg, 2, "no_equity")
        assert len(curated) == 0
        for record in traj.rounds:
            assert record.events and "single-class" in record.events[0]
            assert np.isnan(record.zeta)

    def test_regime_ordering_of_mean_utilization(self):
        full = loop_run("full_equity")[0]
        access = loop_run("access_only")[0]
        none = loop_run("no_equity")[0]
        assert full.mean_zeta() >= access.mean_zeta() >= none.mean_zeta()

    def test_full_equity_keeps_group_fp_rates_close(self):
        traj = loop_run("full_equity")[0]
        for record in traj.rounds:
            gap = abs(record.fp_share_by_group[0] - record.fp_share_by_group[1])
            assert gap <= 0.05

    def test_no_equity_erodes_disadvantaged_positive_share(self):
        traj = loop_run("no_equity")[0]
        first, last = traj.rounds[0], traj.rounds[-1]
        assert last.curated_pos_share_by_group[1] <= first.curated_pos_share_by_group[1]

    def test_outcome_equalized_regime_runs(self):
        traj, _ = run_inequity_loop(small_config(), 2, "access_and_outcome")
        assert len(traj.rounds) == 2
        assert all(not np.isnan(r.zeta) for r in traj.rounds)


class TestTrajectoryCsv:
    def test_columns_and_rows(self):
        traj, _ = run_inequity_loop(small_config(), 2, "no_equity")
        text = trajectory_to_csv(traj)
        lines = text.splitlines()
        assert lines[0] == (
            "round,regime,psi,omega,zeta,pos_rate_g0,pos_rate_g1,"
            "fp_share_g0,fp_share_g1,curated_size"
        )
        assert len(lines) == 3
        assert lines[1].startswith("1,no_equity,")
