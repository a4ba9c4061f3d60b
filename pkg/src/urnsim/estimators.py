"""Monte Carlo harness: interval estimates, empirical distances, and fits.

Accept/reject gates in the verification pipelines all run at 99% confidence
to keep the family-wise false-failure rate of the full suite low.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Params
from .errors import (
    DomainError,
    EmptySampleError,
    InsufficientDataError,
    OrderViolationError,
    SizeMismatchError,
)
from .two_colour import run_two_colour_batch
from .urn_discrete import Trajectory

# two-sided 99% normal quantile
Z99 = 2.5758293035489004
# one-sample Kolmogorov-Smirnov critical coefficient at the 1% level
KS_COEFF_99 = 1.63


@dataclass(frozen=True)
class Estimate:
    point: float
    ci_low: float
    ci_high: float
    n_trials: int
    method: str
    z: float

    def __post_init__(self):
        if not self.ci_low <= self.point <= self.ci_high:
            raise DomainError("interval must contain the point estimate")

    def covers(self, value: float) -> bool:
        return bool(self.ci_low <= value <= self.ci_high)


def wilson_interval(successes: int, trials: int, z: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise DomainError(f"need 0 <= successes <= trials, got {successes}/{trials}")
    if z <= 0:
        raise DomainError(f"z must be positive, got {z}")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    return (max(0.0, centre - margin), min(1.0, centre + margin))


def proportion_estimate(successes: int, trials: int, z: float = Z99, method: str = "wilson") -> Estimate:
    low, high = wilson_interval(successes, trials, z)
    return Estimate(
        point=successes / trials, ci_low=low, ci_high=high, n_trials=trials, method=method, z=z
    )


def mc_equalization(
    params: Params,
    b: int,
    w: int,
    trials: int,
    max_steps: int = 10**5,
    seed: int = 0,
    workers: int = 1,
) -> Estimate:
    """Fraction of runs from (b, w), b > w, that ever hit the diagonal.

    max_steps defaults to 1e5: the probability of a first equalization beyond
    step n falls like 1/n, so the truncation bias is orders of magnitude
    below the 99% interval width at any tested scale.
    """
    if not b > w >= 1:
        raise OrderViolationError(f"equalization estimate needs b > w >= 1, got b={b}, w={w}")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    outcomes = run_two_colour_batch(params, b, w, max_steps, trials, seed, workers)
    successes = sum(1 for o in outcomes if o.equalization_count >= 1)
    return proportion_estimate(successes, trials, method="wilson/mc_equalization")


def ks_statistic(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """sup-distance between the empirical CDF and a reference CDF."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = xs.size
    if n == 0:
        raise EmptySampleError("ks_statistic needs a non-empty sample")
    ref = np.array([cdf(float(x)) for x in xs])
    upper = np.arange(1, n + 1) / n - ref
    lower = ref - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """sup-distance between two empirical CDFs."""
    xa = np.sort(np.asarray(a, dtype=np.float64))
    xb = np.sort(np.asarray(b, dtype=np.float64))
    if xa.size == 0 or xb.size == 0:
        raise EmptySampleError("ks_two_sample needs non-empty samples")
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / xa.size
    fb = np.searchsorted(xb, grid, side="right") / xb.size
    return float(np.abs(fa - fb).max())


def empirical_wasserstein1(a: Sequence[float], b: Sequence[float]) -> float:
    """Mean absolute difference of order statistics; exact W1 for equal sizes."""
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.size == 0:
        raise EmptySampleError("empirical_wasserstein1 needs non-empty samples")
    if xa.size != xb.size:
        raise SizeMismatchError(f"sample sizes differ: {xa.size} vs {xb.size}")
    return float(np.mean(np.abs(np.sort(xa) - np.sort(xb))))


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    n_points: int
    window: tuple[int, int]


def growth_exponent(trajectories: Sequence[Trajectory], n_min: int) -> ExponentFit:
    """Pooled least-squares slope of log M against log N over records with n >= n_min.

    The per-trajectory intercept absorbs the random prefactor, so slopes pool
    after the small-n transient is discarded.  The reported standard error is
    the trajectory-level one (dispersion of per-trajectory slopes), which
    stays honest under within-trajectory correlation; with a single
    trajectory it falls back to the classical OLS formula.
    """
    if len(trajectories) < 10:
        raise InsufficientDataError(f"need >= 10 trajectories, got {len(trajectories)}")
    xs = []
    ys = []
    per_slopes = []
    n_max_seen = 0
    for traj in trajectories:
        mask = traj.ns >= n_min
        if int(mask.sum()) < 5:
            raise InsufficientDataError(
                f"each trajectory needs >= 5 records at n >= {n_min}, got {int(mask.sum())}"
            )
        x = np.log(traj.N[mask].astype(np.float64))
        y = np.log(traj.M[mask].astype(np.float64))
        xs.append(x)
        ys.append(y)
        per_slopes.append(_ols_slope(x, y))
        n_max_seen = max(n_max_seen, int(traj.ns[mask].max()))
    x_all = np.concatenate(xs)
    y_all = np.concatenate(ys)
    slope = _ols_slope(x_all, y_all)
    k = len(per_slopes)
    if k >= 2:
        stderr = float(np.std(per_slopes, ddof=1) / np.sqrt(k))
    else:
        stderr = _ols_stderr(x_all, y_all, slope)
    return ExponentFit(slope=slope, stderr=stderr, n_points=int(x_all.size), window=(n_min, n_max_seen))


def _ols_slope(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    return float(xc @ yc / (xc @ xc))


def _ols_stderr(x: np.ndarray, y: np.ndarray, slope: float) -> float:
    xc = x - x.mean()
    resid = (y - y.mean()) - slope * xc
    dof = max(x.size - 2, 1)
    return float(np.sqrt(resid @ resid / dof / (xc @ xc)))


@dataclass(frozen=True)
class DominanceReport:
    steps: int
    n_trajectories: int
    last_changes: np.ndarray
    change_counts: np.ndarray
    fraction_quiet_final_half: float

    @property
    def median_last_change(self) -> float:
        return float(np.median(self.last_changes))


def dominance_report(trajectories: Sequence[Trajectory]) -> DominanceReport:
    """Distribution of the last leadership change across runs.

    "Quiet final half" (no change after steps/2) is the desk-scale proxy for
    eventual dominance; a run whose leadership never moved counts as quiet.
    """
    if len(trajectories) < 10:
        raise InsufficientDataError(f"need >= 10 trajectories, got {len(trajectories)}")
    steps = trajectories[0].steps
    last = np.array([t.last_leadership_change for t in trajectories], dtype=np.int64)
    counts = np.array([len(t.leadership_changes) for t in trajectories], dtype=np.int64)
    quiet = float(np.mean(last <= steps // 2))
    return DominanceReport(
        steps=steps,
        n_trajectories=len(trajectories),
        last_changes=last,
        change_counts=counts,
        fraction_quiet_final_half=quiet,
    )
