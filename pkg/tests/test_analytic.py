import math

import numpy as np
import pytest

from urnsim import RngStream, derive_params, reg_inc_beta
from urnsim.analytic import (
    apply_T,
    constant_source,
    contraction_factor,
    equalization_bound,
    equalization_prob,
    limit_cdf,
    limit_mixture,
    mean_square_contraction,
    mixture_weights,
    resample_source,
    sample_single_colour_limit,
    single_colour_limit_cdf,
    survivor_pmf,
)
from urnsim.errors import DomainError, OrderViolationError, ParamDomainError
from urnsim.estimators import ks_two_sample

SEED = 20240601

P_GRID = [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95]


class TestMixtureWeights:
    def test_no_extinction_at_p_one(self):
        assert mixture_weights(3, 4, derive_params(1.0)) == (0.0, 1.0, 0.0)

    def test_balanced_start(self, params075):
        r_bw, r_star, r_wb = mixture_weights(1, 1, params075)
        assert r_bw == pytest.approx(5.0 / 18.0, abs=1e-15)
        assert r_star == pytest.approx(4.0 / 9.0, abs=1e-15)
        assert r_wb == pytest.approx(5.0 / 18.0, abs=1e-15)

    @pytest.mark.parametrize("p", P_GRID)
    def test_weights_sum_to_one(self, p):
        params = derive_params(p)
        for b in range(1, 51, 7):
            for w in range(1, 51, 7):
                r_bw, r_star, r_wb = mixture_weights(b, w, params)
                assert abs(r_bw + r_star + r_wb - 1.0) < 1e-12

    def test_domain(self, params075):
        with pytest.raises(DomainError):
            mixture_weights(0, 1, params075)
        with pytest.raises(ParamDomainError):
            from urnsim import sim_params

            mixture_weights(1, 1, sim_params(0.5))


class TestSurvivorPmf:
    def test_single_start(self, params075):
        assert survivor_pmf(1, params075).tolist() == [1.0]

    def test_two_start(self, params075):
        # C(2,1)(2/3)(1/3) = 4/9 and (2/3)^2 = 4/9, normalized by 8/9
        pmf = survivor_pmf(2, params075)
        assert pmf == pytest.approx([0.5, 0.5], abs=1e-14)

    def test_no_extinction_degenerates(self):
        pmf = survivor_pmf(5, derive_params(1.0))
        assert pmf.tolist() == [0.0, 0.0, 0.0, 0.0, 1.0]

    @pytest.mark.parametrize("p", [0.55, 0.75, 0.95])
    @pytest.mark.parametrize("m", [1, 2, 3, 10, 50])
    def test_is_a_pmf(self, p, m):
        pmf = survivor_pmf(m, derive_params(p))
        assert np.all(pmf >= 0)
        assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-12)


class TestLimitCdf:
    def test_total_mass(self, params075):
        assert limit_cdf(2, 3, params075, 1.0) == 1.0

    def test_symmetric_start_halves(self, params075):
        assert limit_cdf(1, 1, params075, 0.5) == pytest.approx(0.5, abs=1e-14)

    def test_polya_reduction_simple(self):
        params = derive_params(1.0)
        assert limit_cdf(2, 1, params, 0.5) == pytest.approx(0.25, abs=1e-14)

    @pytest.mark.parametrize("b,w", [(1, 1), (2, 1), (2, 3), (5, 2), (7, 7)])
    def test_polya_reduction_is_beta(self, b, w):
        params = derive_params(1.0)
        for x in np.linspace(0, 1, 21):
            assert abs(limit_cdf(b, w, params, float(x)) - reg_inc_beta(float(x), b, w)) < 1e-12

    @pytest.mark.parametrize("b,w", [(1, 1), (2, 3), (5, 1), (4, 6)])
    def test_monotone_with_correct_endpoints(self, params075, b, w):
        mix = limit_mixture(b, w, params075)
        grid = np.linspace(0.0, 1.0 - 1e-12, 1000)
        vals = [mix.cdf(float(x)) for x in grid]
        assert all(v2 >= v1 - 1e-10 for v1, v2 in zip(vals, vals[1:]))
        assert vals[0] == pytest.approx(mix.r_bw, abs=1e-10)
        assert vals[-1] == pytest.approx(1.0 - mix.r_wb, abs=1e-10)

    @pytest.mark.parametrize("b,w", [(1, 1), (2, 3), (5, 1), (4, 6)])
    @pytest.mark.parametrize("p", [0.6, 0.75, 0.9])
    def test_mirror_identity_in_the_interior(self, b, w, p):
        # no interior atoms, so F_bw(x) + F_wb(1-x) = 1 away from the endpoints
        params = derive_params(p)
        for x in np.linspace(0.01, 0.99, 33):
            total = limit_cdf(b, w, params, float(x)) + limit_cdf(w, b, params, float(1 - x))
            assert abs(total - 1.0) < 1e-10

    def test_domain(self, params075):
        with pytest.raises(DomainError):
            limit_cdf(2, 3, params075, 1.5)


class TestEqualization:
    def test_polya_catchup(self):
        assert equalization_prob(2, 1, derive_params(1.0)) == pytest.approx(0.5, abs=1e-14)

    def test_hand_evaluated_case(self, params075):
        # r_21 = 7/81, r* = 16/27, survivor pmf (1/2, 1/2), Beta(k,1) CDFs at
        # 1/2 are 1/2 and 1/4: F(1/2) = 25/81, doubled = 50/81
        assert equalization_prob(2, 1, params075) == pytest.approx(50.0 / 81.0, abs=1e-13)

    def test_five_one_closed_form(self, params075):
        # frozen from the same hand evaluation route: F_{5,1}(1/2) = 385/4374
        assert equalization_prob(5, 1, params075) == pytest.approx(385.0 / 2187.0, abs=1e-13)

    def test_order_violation(self, params075):
        with pytest.raises(OrderViolationError):
            equalization_prob(1, 1, params075)
        with pytest.raises(OrderViolationError):
            equalization_prob(2, 3, params075)

    def test_bound_direct_value(self, params075):
        assert equalization_bound(5, params075) == pytest.approx(2 * (2.0 / 3.0) ** 5, abs=1e-15)
        assert equalization_bound(5, params075) == pytest.approx(0.26337, abs=5e-6)

    def test_bound_tight_at_p_one(self):
        params = derive_params(1.0)
        for b in range(2, 12):
            assert equalization_prob(b, 1, params) == pytest.approx(2.0 ** (1 - b), abs=1e-12)
            assert equalization_bound(b, params) == pytest.approx(2.0 ** (1 - b), abs=1e-15)

    def test_bound_vacuous_near_half(self):
        assert equalization_bound(1, derive_params(0.500001)) == pytest.approx(2.0, abs=1e-4)

    @pytest.mark.parametrize("p", P_GRID)
    def test_bound_dominates_exact_value(self, p):
        params = derive_params(p)
        for b in range(2, 51):
            assert equalization_prob(b, 1, params) <= equalization_bound(b, params) + 1e-12


class TestSingleColourLimit:
    def test_atom_at_zero(self, params075):
        assert single_colour_limit_cdf(params075, 0.0) == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_tends_to_one(self, params075):
        assert single_colour_limit_cdf(params075, 1e3) == pytest.approx(1.0, abs=1e-12)

    def test_mean_one(self, params075):
        draws = sample_single_colour_limit(params075, RngStream(SEED, 0), size=10**6)
        assert abs(float(np.mean(draws)) - 1.0) <= 0.004

    def test_zero_mass(self, params075):
        draws = sample_single_colour_limit(params075, RngStream(SEED, 1), size=10**5)
        assert np.mean(draws == 0.0) == pytest.approx(params075.gamma, abs=0.005)

    def test_domain(self, params075):
        with pytest.raises(DomainError):
            single_colour_limit_cdf(params075, -0.5)


class TestApplyT:
    def test_zero_source_maps_to_zero(self, params075):
        out = apply_T(constant_source(0.0), params075, RngStream(SEED, 0), size=1000)
        assert np.all(out == 0.0)

    def test_mean_preserved(self, params075):
        src = lambda rng, size=None: sample_single_colour_limit(params075, rng, size)
        out = apply_T(src, params075, RngStream(SEED, 1), size=10**6)
        assert abs(float(np.mean(out)) - 1.0) <= 0.01

    def test_shrink_factor_moment_oracle(self, params075):
        # Monte Carlo check of E[2 e^{-2(2p-1)tau} Y^2] against 2p/(4p-1)
        gen = RngStream(SEED, 2).generator
        n = 10**6
        tau = -np.log1p(-gen.random(n))
        y = gen.random(n) < params075.p
        mc = float(np.mean(2.0 * np.exp(-2.0 * 0.5 * tau) * y))
        assert mc == pytest.approx(mean_square_contraction(params075), abs=0.003)

    def test_fixed_point_in_distribution(self, params075):
        n = 2 * 10**4
        src = lambda rng, size=None: sample_single_colour_limit(params075, rng, size)
        ref = src(RngStream(SEED, 3), n)
        img = apply_T(src, params075, RngStream(SEED, 4), size=n)
        assert ks_two_sample(ref, img) < 1.63 * math.sqrt(2.0 / n)

    def test_iteration_contracts_wasserstein(self, params075):
        from urnsim.estimators import empirical_wasserstein1

        n = 10**4
        src = lambda rng, size=None: sample_single_colour_limit(params075, rng, size)
        ref = np.asarray(src(RngStream(SEED, 5), n))
        current = np.ones(n)
        d = [empirical_wasserstein1(current, ref)]
        for it in range(3):
            current = np.asarray(
                apply_T(resample_source(current), params075, RngStream(SEED, 6 + it), size=n)
            )
            d.append(empirical_wasserstein1(current, ref))
        limit = contraction_factor(params075) + 0.05
        assert all(d[i + 1] / d[i] <= limit for i in range(3))


class TestContraction:
    def test_known_values(self):
        assert contraction_factor(derive_params(0.75)) == pytest.approx(math.sqrt(0.75), abs=1e-15)
        assert contraction_factor(derive_params(1.0)) == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-15)

    def test_monotone_decreasing_in_p(self):
        grid = np.linspace(0.5001, 1.0, 400)
        vals = [contraction_factor(derive_params(float(p))) for p in grid]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(v < 1.0 for v in vals)

    def test_square_is_the_mean_shrink(self):
        for p in P_GRID:
            params = derive_params(p)
            assert contraction_factor(params) ** 2 == pytest.approx(
                mean_square_contraction(params), abs=1e-14
            )
