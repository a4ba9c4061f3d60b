import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import betainc

from urnsim.core import (
    Bernoulli,
    Exponential,
    GammaInt,
    RngStream,
    Uniform,
    binom_pmf,
    derive_params,
    map_trials,
    reg_inc_beta,
    sample,
    sim_params,
)
from urnsim.errors import DomainError, ParamDomainError

SEED = 20240601


class TestDeriveParams:
    def test_p_one_is_the_classical_urn(self):
        pr = derive_params(1.0)
        assert pr.beta == 1.0
        assert pr.gamma == 0.0

    def test_p_075(self):
        pr = derive_params(0.75)
        assert pr.beta == pytest.approx(1.5, abs=1e-15)
        assert pr.gamma == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_p_06_matches_three_fifths_setup(self):
        pr = derive_params(0.6)
        assert pr.beta == pytest.approx(3.0, abs=1e-12)
        assert pr.gamma == pytest.approx(2.0 / 3.0, abs=1e-12)

    @pytest.mark.parametrize("p", [0.5, 0.3, 0.0, 1.0001, -0.2])
    def test_domain(self, p):
        with pytest.raises(ParamDomainError):
            derive_params(p)

    @pytest.mark.parametrize("p", np.linspace(0.501, 1.0, 23).tolist())
    def test_algebraic_identities(self, p):
        pr = derive_params(p)
        assert abs(pr.beta * (2 * p - 1) - p) < 1e-12
        assert abs(pr.gamma * p - (1 - p)) < 1e-12
        assert abs((1 - pr.gamma) - 1 / pr.beta) < 1e-12

    @pytest.mark.parametrize("p", [0.51, 0.6, 0.75, 0.9, 1.0])
    def test_involution(self, p):
        pr = derive_params(p)
        assert abs(pr.beta / (2 * pr.beta - 1) - p) < 1e-12

    def test_sim_params_any_p(self):
        assert sim_params(0.3).beta is None
        assert sim_params(0.3).gamma is None
        assert sim_params(0.5).gamma == 1.0
        assert sim_params(0.5).beta is None
        assert sim_params(0.75).beta == 1.5
        with pytest.raises(ParamDomainError):
            sim_params(1.2)
        with pytest.raises(ParamDomainError):
            sim_params(0.3).require_supercritical()


class TestRegIncBeta:
    def test_uniform(self):
        assert reg_inc_beta(0.5, 1, 1) == pytest.approx(0.5, abs=1e-15)

    def test_power_law_case(self):
        # Beta(k, 1) CDF is x^k
        assert reg_inc_beta(0.5, 3, 1) == pytest.approx(0.125, abs=1e-14)

    def test_2_3_against_quadrature(self):
        # independent oracle: integrate the Beta(2,3) density 12 x (1-x)^2
        oracle, err = integrate.quad(lambda x: 12 * x * (1 - x) ** 2, 0, 0.5)
        assert err < 1e-12
        assert oracle == pytest.approx(0.6875, abs=1e-10)
        assert reg_inc_beta(0.5, 2, 3) == pytest.approx(oracle, abs=1e-12)

    def test_endpoints(self):
        assert reg_inc_beta(0.0, 4, 7) == 0.0
        assert reg_inc_beta(1.0, 4, 7) == 1.0

    def test_symmetry_identity(self):
        rng = np.random.default_rng(SEED)
        for _ in range(200):
            a = int(rng.integers(1, 51))
            b = int(rng.integers(1, 51))
            x = float(rng.random())
            assert abs(reg_inc_beta(x, a, b) + reg_inc_beta(1 - x, b, a) - 1) < 1e-12

    def test_large_integer_parameters(self):
        rng = np.random.default_rng(SEED + 1)
        for _ in range(50):
            a = int(rng.integers(1, 2001))
            b = int(rng.integers(1, 2001))
            x = float(rng.random())
            assert reg_inc_beta(x, a, b) == pytest.approx(betainc(a, b, x), abs=5e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            reg_inc_beta(0.5, 0, 3)
        with pytest.raises(DomainError):
            reg_inc_beta(0.5, 3, 0)
        with pytest.raises(DomainError):
            reg_inc_beta(1.5, 1, 1)
        with pytest.raises(DomainError):
            reg_inc_beta(-0.1, 1, 1)


class TestBinomPmf:
    def test_degenerate_q(self):
        assert binom_pmf(0, 5, 0.0) == 1.0
        assert binom_pmf(3, 5, 0.0) == 0.0
        assert binom_pmf(5, 5, 1.0) == 1.0
        assert binom_pmf(4, 5, 1.0) == 0.0

    def test_simple_expansion(self):
        assert binom_pmf(1, 2, 2.0 / 3.0) == pytest.approx(4.0 / 9.0, abs=1e-15)

    @pytest.mark.parametrize("n,q", [(3, 0.5), (17, 0.2), (100, 2.0 / 3.0), (1000, 0.123), (10**4, 0.42)])
    def test_normalization(self, n, q):
        total = math.fsum(binom_pmf(k, n, q) for k in range(n + 1))
        assert abs(total - 1.0) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            binom_pmf(-1, 5, 0.5)
        with pytest.raises(DomainError):
            binom_pmf(6, 5, 0.5)
        with pytest.raises(DomainError):
            binom_pmf(2, 5, 1.5)


class TestSample:
    def test_bernoulli_certain(self):
        rng = RngStream(SEED)
        assert sample(Bernoulli(1.0), rng) == 1.0
        assert sample(Bernoulli(0.0), RngStream(SEED)) == 0.0

    def test_exponential_mean(self):
        draws = sample(Exponential(2.0), RngStream(SEED, 1), size=10**6)
        assert np.mean(draws) == pytest.approx(0.5, abs=0.002)

    def test_gamma_integer_shape_mean(self):
        draws = sample(GammaInt(3, 2.0), RngStream(SEED, 2), size=10**6)
        assert np.mean(draws) == pytest.approx(1.5, abs=0.005)

    def test_gamma_is_sum_of_exponentials(self):
        # same stream: a GammaInt(3, r) draw consumes exactly the three
        # uniforms that three Exponential(r) draws would
        g = sample(GammaInt(3, 2.0), RngStream(SEED, 3), size=100)
        rng = RngStream(SEED, 3)
        e = sum(sample(Exponential(2.0), rng, size=100) for _ in range(3))
        assert np.allclose(g, e, rtol=0, atol=0)

    def test_uniform_range(self):
        draws = sample(Uniform(), RngStream(SEED, 4), size=10**4)
        assert np.all((draws >= 0.0) & (draws < 1.0))

    def test_domain(self):
        rng = RngStream(SEED)
        for bad in [Exponential(0.0), Exponential(-1.0), Bernoulli(1.2), GammaInt(0, 1.0), GammaInt(2, 0.0)]:
            with pytest.raises(DomainError):
                sample(bad, rng)


class TestRngStream:
    def test_reproducible(self):
        sa, sb = RngStream(17, 3), RngStream(17, 3)
        a = [sa.random() for _ in range(5)]
        b = [sb.random() for _ in range(5)]
        assert a == b
        xs = RngStream(17, 3).generator.random(5)
        assert list(xs) == a

    def test_schedule_independence(self):
        # interleaving two streams does not change what either produces
        s0, s1 = RngStream(9, 0), RngStream(9, 1)
        interleaved0, interleaved1 = [], []
        for _ in range(50):
            interleaved0.append(s0.random())
            interleaved1.append(s1.random())
        solo0, solo1 = RngStream(9, 0), RngStream(9, 1)
        assert interleaved0 == [solo0.random() for _ in range(50)]
        assert interleaved1 == [solo1.random() for _ in range(50)]

    def test_distinct_streams_uncorrelated(self):
        n = 10**4
        a = RngStream(SEED, 0).generator.random(n)
        b = RngStream(SEED, 1).generator.random(n)
        assert not np.array_equal(a, b)
        r = np.corrcoef(a, b)[0, 1]
        assert abs(r) < 4 / math.sqrt(n)

    def test_spawn(self):
        s = RngStream(123, 0)
        assert s.spawn(7).stream_index == 7
        assert s.spawn(7).seed == 123

    def test_negative_seed_masked(self):
        assert RngStream(-1).seed == (1 << 64) - 1

    def test_map_trials_worker_invariance(self):
        fn = lambda rng: rng.generator.random(4).tolist()
        assert map_trials(fn, 16, SEED, workers=1) == map_trials(fn, 16, SEED, workers=4)
        with pytest.raises(DomainError):
            map_trials(fn, 0, SEED)
