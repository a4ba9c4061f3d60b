import math

import numpy as np
import pytest

from urnsim import sim_params
from urnsim.errors import (
    DomainError,
    EmptySampleError,
    InsufficientDataError,
    OrderViolationError,
    SizeMismatchError,
)
from urnsim.estimators import (
    Estimate,
    Z99,
    dominance_report,
    empirical_wasserstein1,
    growth_exponent,
    ks_statistic,
    ks_two_sample,
    mc_equalization,
    wilson_interval,
)
from urnsim.urn_discrete import Trajectory, run_trajectory_batch

SEED = 20240601


def _fake_trajectory(ns, N, M, steps=None, changes=()):
    ns = np.asarray(ns, dtype=np.int64)
    return Trajectory(
        seed=0,
        stream_index=0,
        p=0.75,
        steps=int(steps if steps is not None else ns[-1]),
        ns=ns,
        N=np.asarray(N, dtype=np.int64),
        M=np.asarray(M, dtype=np.int64),
        leader_ids=np.zeros(len(ns), dtype=np.int64),
        num_colours=np.ones(len(ns), dtype=np.int64),
        leadership_changes=np.asarray(changes, dtype=np.int64),
    )


class TestWilson:
    def test_zero_successes_floor(self):
        lo, hi = wilson_interval(0, 50, 1.96)
        assert lo == 0.0 and hi > 0.0

    def test_all_successes_ceiling(self):
        lo, hi = wilson_interval(50, 50, 1.96)
        assert hi == 1.0 and lo < 1.0

    def test_direct_evaluation(self):
        # frozen from evaluating the score interval by hand at 50/100, z=1.96
        lo, hi = wilson_interval(50, 100, 1.96)
        assert lo == pytest.approx(0.4038, abs=1e-4)
        assert hi == pytest.approx(0.5962, abs=1e-4)

    def test_domain(self):
        with pytest.raises(DomainError):
            wilson_interval(3, 0, 1.96)
        with pytest.raises(DomainError):
            wilson_interval(5, 4, 1.96)
        with pytest.raises(DomainError):
            wilson_interval(1, 4, 0.0)

    def test_estimate_invariant(self):
        with pytest.raises(DomainError):
            Estimate(point=0.9, ci_low=0.1, ci_high=0.5, n_trials=10, method="x", z=1.0)


class TestMcEqualization:
    def test_covers_polya_half(self, params1):
        est = mc_equalization(params1, 2, 1, trials=2000, max_steps=10**4, seed=SEED, workers=4)
        assert est.covers(0.5)
        assert est.n_trials == 2000

    def test_validation(self, params075):
        with pytest.raises(OrderViolationError):
            mc_equalization(params075, 1, 2, trials=10, seed=SEED)
        with pytest.raises(DomainError):
            mc_equalization(params075, 2, 1, trials=0, seed=SEED)

    def test_coverage_self_test(self, params1):
        # 99% intervals on a known-true value must cover in >= 95 of 100
        # meta-runs; the p = 1 catch-up probability from (2, 1) is exactly 1/2
        covered = 0
        for meta in range(100):
            est = mc_equalization(params1, 2, 1, trials=200, max_steps=5000, seed=9000 + meta)
            covered += est.covers(0.5)
        assert covered >= 95


class TestKs:
    def test_single_sample(self):
        assert ks_statistic([0.5], lambda x: x) == pytest.approx(0.5, abs=1e-15)

    def test_two_point_sample(self):
        assert ks_statistic([0.25, 0.75], lambda x: x) == pytest.approx(0.25, abs=1e-15)

    def test_permutation_invariant(self):
        a = [0.9, 0.1, 0.4, 0.7, 0.2]
        assert ks_statistic(a, lambda x: x) == ks_statistic(sorted(a), lambda x: x)

    def test_two_sample_identical(self):
        xs = np.linspace(0, 1, 100)
        assert ks_two_sample(xs, xs) == 0.0

    def test_two_sample_symmetric(self):
        rng = np.random.default_rng(SEED)
        a, b = rng.random(200), rng.random(300)
        assert ks_two_sample(a, b) == ks_two_sample(b, a)

    def test_empty(self):
        with pytest.raises(EmptySampleError):
            ks_statistic([], lambda x: x)
        with pytest.raises(EmptySampleError):
            ks_two_sample([], [1.0])


class TestWasserstein:
    def test_identical(self):
        xs = [3.0, 1.0, 2.0]
        assert empirical_wasserstein1(xs, xs) == 0.0

    def test_point_masses(self):
        assert empirical_wasserstein1([0.0], [1.0]) == 1.0

    def test_sorted_coupling(self):
        assert empirical_wasserstein1([0.0, 1.0], [1.0, 2.0]) == 1.0

    def test_symmetric(self):
        rng = np.random.default_rng(SEED)
        a, b = rng.random(100), rng.random(100)
        assert empirical_wasserstein1(a, b) == empirical_wasserstein1(b, a)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            empirical_wasserstein1([1.0], [1.0, 2.0])
        with pytest.raises(EmptySampleError):
            empirical_wasserstein1([], [])


class TestGrowthExponent:
    def test_exact_power_law_recovered(self):
        # M = N^{1/2} exactly on integer squares: slope must come back 0.5
        trajs = []
        for t in range(10):
            ks = np.arange(2 + t, 22 + t)
            trajs.append(_fake_trajectory(ns=ks**2, N=ks**2, M=ks))
        fit = growth_exponent(trajs, n_min=0)
        assert abs(fit.slope - 0.5) < 1e-10
        assert fit.stderr < 1e-10
        assert fit.n_points == 200

    def test_polya_slope_is_exactly_one(self, params1):
        trajs = run_trajectory_batch(params1, 2 * 10**4, 10, SEED)
        fit = growth_exponent(trajs, n_min=100)
        assert abs(fit.slope - 1.0) < 1e-10

    def test_requires_enough_data(self):
        trajs = [_fake_trajectory(ns=[1, 2, 3], N=[1, 2, 3], M=[1, 2, 3]) for _ in range(3)]
        with pytest.raises(InsufficientDataError):
            growth_exponent(trajs, n_min=0)
        trajs = [
            _fake_trajectory(ns=[10, 20, 30, 40, 50], N=[10, 20, 30, 40, 50], M=[1, 2, 3, 4, 5])
            for _ in range(10)
        ]
        with pytest.raises(InsufficientDataError):
            growth_exponent(trajs, n_min=25)  # only 3 usable records each

    def test_supercritical_slope(self, growth_batch):
        fit = growth_exponent(growth_batch, n_min=10**4)
        assert 0.617 <= fit.slope <= 0.717
        assert fit.stderr >= 0.0
        assert fit.window[0] == 10**4 and fit.window[1] == 10**6


class TestDominance:
    def test_polya_never_changes(self, params1):
        trajs = run_trajectory_batch(params1, 1000, 12, SEED)
        rep = dominance_report(trajs)
        assert rep.last_changes.tolist() == [0] * 12
        assert rep.change_counts.tolist() == [0] * 12
        assert rep.fraction_quiet_final_half == 1.0

    def test_counts_are_exact(self, params075):
        trajs = run_trajectory_batch(params075, 2000, 15, SEED + 1)
        rep = dominance_report(trajs)
        for traj, count, last in zip(trajs, rep.change_counts, rep.last_changes):
            assert count == len(traj.leadership_changes)
            assert last == traj.last_leadership_change

    def test_requires_enough_runs(self, params075):
        trajs = run_trajectory_batch(params075, 100, 5, SEED)
        with pytest.raises(InsufficientDataError):
            dominance_report(trajs)
