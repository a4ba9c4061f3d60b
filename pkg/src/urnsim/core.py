"""Model parameters, reproducible random streams, and sampling primitives.

The single free parameter is the duplication probability p.  In the
supercritical regime p > 1/2 two derived constants drive every closed form:

    beta  = p / (2p - 1)        (reciprocal of the growth exponent)
    gamma = (1 - p) / p         (extinction probability of one colour)

They satisfy 1 - gamma = 1/beta identically.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, TypeVar

import numpy as np

from .errors import DomainError, ParamDomainError

_MASK64 = (1 << 64) - 1

T = TypeVar("T")


@dataclass(frozen=True)
class Params:
    """Parameter p plus derived constants where they are defined.

    beta exists only for p > 1/2 and gamma only for p >= 1/2; outside those
    ranges the fields are None and operations that need them refuse the
    instance.  Simulators only read p and accept any value in [0, 1].
    """

    p: float
    beta: float | None
    gamma: float | None

    def require_supercritical(self) -> tuple[float, float]:
        """Return (beta, gamma), raising ParamDomainError unless p > 1/2."""
        if self.beta is None or self.gamma is None:
            raise ParamDomainError(
                f"operation needs derived constants, defined only for p > 1/2 (got p={self.p})"
            )
        return self.beta, self.gamma


def derive_params(p: float) -> Params:
    """Build Params with both derived constants; requires 1/2 < p <= 1."""
    if not 0.5 < p <= 1.0:
        raise ParamDomainError(f"derived constants need 1/2 < p <= 1, got p={p}")
    p = float(p)
    return Params(p=p, beta=p / (2.0 * p - 1.0), gamma=(1.0 - p) / p)


def sim_params(p: float) -> Params:
    """Params for simulation at any p in [0, 1]; constants filled where defined."""
    if not 0.0 <= p <= 1.0:
        raise ParamDomainError(f"p must lie in [0, 1], got p={p}")
    p = float(p)
    beta = p / (2.0 * p - 1.0) if p > 0.5 else None
    gamma = (1.0 - p) / p if p >= 0.5 else None
    return Params(p=p, beta=beta, gamma=gamma)


class RngStream:
    """One reproducible random stream addressed by (seed, stream_index).

    The same pair always yields the bit-identical draw sequence, regardless
    of how trials are scheduled; distinct stream indices give independent
    streams (PCG64 seeded through a SeedSequence spawn key).
    """

    __slots__ = ("seed", "stream_index", "_generator")

    def __init__(self, seed: int, stream_index: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_index = int(stream_index)
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
            self._generator = np.random.Generator(np.random.PCG64(ss))
        return self._generator

    def random(self) -> float:
        """One uniform draw in [0, 1)."""
        return float(self.generator.random())

    def spawn(self, stream_index: int) -> "RngStream":
        """Sibling stream with the same seed and a different index."""
        return RngStream(self.seed, stream_index)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index})"


def map_trials(fn: Callable[[RngStream], T], trials: int, seed: int, workers: int = 1) -> list[T]:
    """Run fn once per trial with its own stream; result order is by trial index.

    Streams are confined to one task each, so the output is independent of
    the worker count and of scheduling.  Trials are dispatched in contiguous
    chunks to keep executor overhead off the per-trial path.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if workers <= 1:
        return [fn(RngStream(seed, i)) for i in range(trials)]

    chunk = max(1, min(256, trials // (4 * workers) + 1))
    starts = range(0, trials, chunk)

    def run_chunk(start: int) -> list[T]:
        return [fn(RngStream(seed, i)) for i in range(start, min(start + chunk, trials))]

    out: list[T] = []
    with ThreadPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(run_chunk, starts):
            out.extend(part)
    return out


# ---------------------------------------------------------------------------
# Distribution specs and sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponential:
    rate: float


@dataclass(frozen=True)
class Bernoulli:
    q: float


@dataclass(frozen=True)
class GammaInt:
    """Gamma(shape, rate) with integer shape: sum of shape Exponential(rate) draws.

    Rate convention: mean = shape / rate.
    """

    shape: int
    rate: float


@dataclass(frozen=True)
class Uniform:
    pass


DistSpec = Exponential | Bernoulli | GammaInt | Uniform


def sample(spec: DistSpec, rng: RngStream, size: int | None = None):
    """Draw from spec using only uniforms from rng (inverse-CDF transforms).

    Returns a float when size is None, else an ndarray of length size.
    """
    gen = rng.generator
    if isinstance(spec, Uniform):
        out = gen.random(size)
    elif isinstance(spec, Exponential):
        if spec.rate <= 0.0:
            raise DomainError(f"Exponential rate must be positive, got {spec.rate}")
        out = -np.log1p(-gen.random(size)) / spec.rate
    elif isinstance(spec, Bernoulli):
        if not 0.0 <= spec.q <= 1.0:
            raise DomainError(f"Bernoulli q must lie in [0, 1], got {spec.q}")
        out = np.asarray(gen.random(size) < spec.q, dtype=np.float64)
    elif isinstance(spec, GammaInt):
        if spec.shape < 1 or spec.shape != int(spec.shape):
            raise DomainError(f"Gamma shape must be a positive integer, got {spec.shape}")
        if spec.rate <= 0.0:
            raise DomainError(f"Gamma rate must be positive, got {spec.rate}")
        acc = np.zeros(size if size is not None else (), dtype=np.float64)
        for _ in range(int(spec.shape)):
            acc = acc + (-np.log1p(-gen.random(size)) / spec.rate)
        out = acc
    else:
        raise DomainError(f"unknown distribution spec {spec!r}")
    if size is None:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Special functions with integer parameters
# ---------------------------------------------------------------------------


def binom_pmf(k: int, n: int, q: float) -> float:
    """P[Binomial(n, q) = k], stable in log space for n up to 1e4."""
    if n < 1 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n with n >= 1, got k={k}, n={n}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    if q == 0.0:
        return 1.0 if k == 0 else 0.0
    if q == 1.0:
        return 1.0 if k == n else 0.0
    # math.log of the exact integer binomial keeps the log accurate to ~1 ulp,
    # which lgamma differences do not.
    log_term = math.log(math.comb(n, k)) + k * math.log(q) + (n - k) * math.log1p(-q)
    return math.exp(log_term)


def reg_inc_beta(x: float, a: int, b: int) -> float:
    """Regularized incomplete beta I_x(a, b) for integer a, b >= 1.

    Uses the finite binomial-sum identity I_x(a,b) = P[Binomial(a+b-1, x) >= a],
    summed outward from the largest term so the result stays accurate for
    parameters in the thousands.
    """
    if a < 1 or b < 1:
        raise DomainError(f"parameters must be integers >= 1, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    n = a + b - 1
    # Anchor at the in-range mode of the binomial pmf.
    j0 = min(max(int((n + 1) * x), a), n)
    t0 = binom_pmf(j0, n, x)
    total = t0
    ratio = x / (1.0 - x)
    # upward from anchor
    t = t0
    for j in range(j0, n):
        t *= (n - j) / (j + 1.0) * ratio
        total += t
        if t < total * 1e-18:
            break
    # downward from anchor, stopping at j = a
    t = t0
    for j in range(j0, a, -1):
        t *= j / (n - j + 1.0) / ratio
        total += t
        if t < total * 1e-18:
            break
    return min(total, 1.0)
