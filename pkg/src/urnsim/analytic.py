"""Closed-form limit laws and the distributional fixed-point operator.

Everything here is driven by gamma = (1-p)/p and beta = p/(2p-1):

* one colour, rescaled: an atom of mass gamma at 0 plus an Exponential with
  rate 1/beta (mean beta) on the survivors, so the overall mean is 1;
* two colours from (b, w): atoms at 0 and 1 with weights r_bw and r_wb plus
  a Beta(G_b, H_w) bulk, where G_b, H_w are Binomial(m, 1-gamma) survivor
  counts conditioned on being nonzero;
* the fixed-point map T Z = e^{-(2p-1) tau} Y (Z' + Z'') with tau ~ Exp(1),
  Y ~ Bernoulli(p), whose unique mean-1 finite-variance fixed point is the
  one-colour limit law.

p = 1 is admitted everywhere via gamma = 0, where the two-colour limit
collapses to the classical Beta(b, w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Params, RngStream, binom_pmf, reg_inc_beta
from .errors import DomainError, OrderViolationError

SourceSampler = Callable[[RngStream, "int | None"], "float | np.ndarray"]


# ---------------------------------------------------------------------------
# One-colour limit law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingleColourLimit:
    """Atom at 0 of mass gamma plus Exponential(rate 1/beta) on (0, inf)."""

    params: Params
    atom_mass: float
    rate: float

    def cdf(self, x: float) -> float:
        if x < 0:
            raise DomainError(f"x must be >= 0, got {x}")
        return self.atom_mass + (1.0 - self.atom_mass) * (1.0 - math.exp(-self.rate * x))

    def sample(self, rng: RngStream, size: int | None = None):
        gen = rng.generator
        u_atom = gen.random(size)
        u_exp = gen.random(size)
        draw = np.where(u_atom < self.atom_mass, 0.0, -np.log1p(-u_exp) / self.rate)
        return float(draw) if size is None else draw


def single_colour_limit(params: Params) -> SingleColourLimit:
    beta, gamma = params.require_supercritical()
    return SingleColourLimit(params=params, atom_mass=gamma, rate=1.0 / beta)


def single_colour_limit_cdf(params: Params, x: float) -> float:
    """CDF gamma + (1 - gamma)(1 - e^{-x/beta}) of the rescaled one-colour limit."""
    return single_colour_limit(params).cdf(x)


def sample_single_colour_limit(params: Params, rng: RngStream, size: int | None = None):
    """Draw 0 with probability gamma, else Exponential(rate 1/beta)."""
    return single_colour_limit(params).sample(rng, size)


# ---------------------------------------------------------------------------
# Two-colour limit mixture
# ---------------------------------------------------------------------------


def mixture_weights(b: int, w: int, params: Params) -> tuple[float, float, float]:
    """(atom at 0, continuous weight, atom at 1) for the limit from (b, w)."""
    _beta, gamma = params.require_supercritical()
    if b < 1 or w < 1:
        raise DomainError(f"initial counts must be >= 1, got b={b}, w={w}")
    r_bw = gamma**b * (1.0 - b / (b + w) * gamma**w)
    r_wb = gamma**w * (1.0 - w / (b + w) * gamma**b)
    r_star = (1.0 - gamma**b) * (1.0 - gamma**w)
    return r_bw, r_star, r_wb


def survivor_pmf(m: int, params: Params) -> np.ndarray:
    """pmf over {1..m} of Binomial(m, 1-gamma) conditioned on being nonzero.

    Entry k-1 holds P[k].  gamma = 0 degenerates to a point mass at m.
    """
    _beta, gamma = params.require_supercritical()
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if gamma == 0.0:
        pmf = np.zeros(m)
        pmf[m - 1] = 1.0
        return pmf
    norm = 1.0 - gamma**m
    pmf = np.array([binom_pmf(k, m, 1.0 - gamma) for k in range(1, m + 1)])
    return pmf / norm


@dataclass(frozen=True)
class LimitMixture:
    """Full description of the two-colour limit law from (b, w)."""

    b: int
    w: int
    params: Params
    r_bw: float
    r_star: float
    r_wb: float
    g_pmf: np.ndarray
    h_pmf: np.ndarray

    def continuous_cdf(self, x: float) -> float:
        """CDF of the Beta(G_b, H_w) bulk (already normalized to mass 1)."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0, 1], got {x}")
        total = 0.0
        for k in range(1, self.b + 1):
            gk = self.g_pmf[k - 1]
            if gk == 0.0:
                continue
            for l in range(1, self.w + 1):
                hl = self.h_pmf[l - 1]
                if hl == 0.0:
                    continue
                total += gk * hl * reg_inc_beta(x, k, l)
        return total

    def cdf(self, x: float) -> float:
        """Right-continuous mixture CDF; F(1) = 1 includes the atom at 1."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0, 1], got {x}")
        if x == 1.0:
            return 1.0
        return self.r_bw + self.r_star * self.continuous_cdf(x)


def limit_mixture(b: int, w: int, params: Params) -> LimitMixture:
    r_bw, r_star, r_wb = mixture_weights(b, w, params)
    return LimitMixture(
        b=b,
        w=w,
        params=params,
        r_bw=r_bw,
        r_star=r_star,
        r_wb=r_wb,
        g_pmf=survivor_pmf(b, params),
        h_pmf=survivor_pmf(w, params),
    )


def limit_cdf(b: int, w: int, params: Params, x: float) -> float:
    """Mixture CDF at x: r_bw + r_star * sum_kl g[k] h[l] I_x(k, l), and F(1) = 1."""
    return limit_mixture(b, w, params).cdf(x)


def equalization_prob(b: int, w: int, params: Params) -> float:
    """P(the two counts are ever equal) from b > w: twice the mixture CDF at 1/2."""
    if not b > w >= 1:
        raise OrderViolationError(f"equalization probability needs b > w >= 1, got b={b}, w={w}")
    return 2.0 * limit_cdf(b, w, params, 0.5)


def equalization_bound(b: int, params: Params) -> float:
    """Exponential bound 2 (2p)^{-b} on the catch-up probability from (b, 1).

    At b = 1 and p near 1/2 the bound approaches 2 and is vacuous; that is
    the formula's value, not an error.
    """
    params.require_supercritical()
    if b < 1:
        raise DomainError(f"b must be >= 1, got {b}")
    return 2.0 * (2.0 * params.p) ** (-b)


# ---------------------------------------------------------------------------
# Fixed-point operator
# ---------------------------------------------------------------------------


def apply_T(
    source_sampler: SourceSampler, params: Params, rng: RngStream, size: int | None = None
):
    """Draw e^{-(2p-1) tau} Y (Z' + Z'') with Z', Z'' from source_sampler.

    Draw order per output: tau, Y, Z', Z''.  source_sampler must accept
    (rng, size) and yield independent non-negative draws.
    """
    p = params.p
    rate = 2.0 * p - 1.0
    gen = rng.generator
    tau = -np.log1p(-gen.random(size))
    y = (gen.random(size) < p).astype(np.float64)
    z1 = source_sampler(rng, size)
    z2 = source_sampler(rng, size)
    out = np.exp(-rate * tau) * y * (np.asarray(z1) + np.asarray(z2))
    return float(out) if size is None else out


def resample_source(sample: np.ndarray) -> SourceSampler:
    """Source sampler drawing with replacement from an empirical sample."""
    arr = np.asarray(sample, dtype=np.float64)
    if arr.size == 0:
        raise DomainError("empirical source needs a non-empty sample")

    def _sampler(rng: RngStream, size: int | None = None):
        idx = rng.generator.integers(0, arr.size, size=size)
        out = arr[idx]
        return float(out) if size is None else out

    return _sampler


def constant_source(value: float) -> SourceSampler:
    """Source sampler for a point mass (used to start fixed-point iteration)."""

    def _sampler(rng: RngStream, size: int | None = None):
        if size is None:
            return float(value)
        return np.full(size, float(value))

    return _sampler


def mean_square_contraction(params: Params) -> float:
    """E[2 e^{-2(2p-1) tau} Y^2] = 2p / (4p - 1) for tau ~ Exp(1), Y ~ Bernoulli(p)."""
    params.require_supercritical()
    p = params.p
    return 2.0 * p / (4.0 * p - 1.0)


def contraction_factor(params: Params) -> float:
    """L2 contraction factor sqrt(2p / (4p - 1)) of the fixed-point map; < 1."""
    value = math.sqrt(mean_square_contraction(params))
    assert value < 1.0
    return value
