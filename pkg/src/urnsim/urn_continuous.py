"""Continuous-time embedding: per-colour birth-death paths and the total count.

A colour with x balls waits an Exponential(x) time until its next event,
which is a birth with probability p and a death otherwise (every ball carries
a rate-p birth clock and a rate-(1-p) death clock, so the aggregated event
rate is x and the event type is an independent Bernoulli(p) draw).  The total
ball count of the full urn only grows on birth events, i.e. it is a pure
birth process at per-ball rate p.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Params, RngStream, map_trials
from .errors import DomainError, EventBudgetExceededError, HorizonZeroError, ParamDomainError

HARD_EVENT_CAP = 10**8


class FiniteHorizonWarning(UserWarning):
    """The evaluation time is too small for the scaling limit to have set in."""


@dataclass(frozen=True)
class Horizon:
    """Stopping rule: a time limit, an event-count limit, or both."""

    t_max: float | None = None
    event_budget: int | None = None

    def validated(self) -> "Horizon":
        if self.t_max is None and self.event_budget is None:
            raise HorizonZeroError("horizon needs t_max or event_budget")
        if self.t_max is not None and self.t_max < 0:
            raise DomainError(f"t_max must be >= 0, got {self.t_max}")
        if self.event_budget is not None and self.event_budget < 1:
            raise DomainError(f"event_budget must be >= 1, got {self.event_budget}")
        return self


@dataclass(frozen=True)
class BirthDeathPath:
    """Event log of one colour: times (first entry 0) and population after each."""

    times: np.ndarray
    populations: np.ndarray
    extinct: bool
    params: Params

    @property
    def n_events(self) -> int:
        return len(self.times) - 1

    @property
    def final_population(self) -> int:
        return int(self.populations[-1])


@njit(cache=True, nogil=True)
def _bd_path_kernel(gen, p, t_max, stop_events, hard_cap):  # pragma: no cover
    cap = 1024
    times = np.empty(cap, dtype=np.float64)
    pops = np.empty(cap, dtype=np.int64)
    times[0] = 0.0
    pops[0] = 1
    m = 1
    x = 1
    t = 0.0
    ev = 0
    hit_cap = False
    while x > 0:
        if stop_events >= 0 and ev >= stop_events:
            break
        if ev >= hard_cap:
            hit_cap = True
            break
        u1 = gen.random()
        dt = -math.log1p(-u1) / x
        if t_max >= 0.0 and t + dt > t_max:
            break
        t += dt
        u2 = gen.random()
        if u2 < p:
            x += 1
        else:
            x -= 1
        ev += 1
        if m == cap:
            cap *= 2
            t2 = np.empty(cap, dtype=np.float64)
            p2 = np.empty(cap, dtype=np.int64)
            t2[:m] = times
            p2[:m] = pops
            times = t2
            pops = p2
        times[m] = t
        pops[m] = x
        m += 1
    return times[:m], pops[:m], x, ev, hit_cap


@njit(cache=True, nogil=True)
def _bd_final_kernel(gen, p, t_max, stop_events, hard_cap):  # pragma: no cover
    x = 1
    t = 0.0
    ev = 0
    births = 0
    hit_cap = False
    while x > 0:
        if stop_events >= 0 and ev >= stop_events:
            break
        if ev >= hard_cap:
            hit_cap = True
            break
        u1 = gen.random()
        dt = -math.log1p(-u1) / x
        if t_max >= 0.0 and t + dt > t_max:
            break
        t += dt
        u2 = gen.random()
        if u2 < p:
            x += 1
            births += 1
        else:
            x -= 1
        ev += 1
    return x, ev, births, hit_cap


@njit(cache=True, nogil=True)
def _yule_kernel(gen, p, t_max, hard_cap):  # pragma: no cover
    x = 1
    t = 0.0
    ev = 0
    hit_cap = False
    while True:
        if ev >= hard_cap:
            hit_cap = True
            break
        u = gen.random()
        dt = -math.log1p(-u) / (p * x)
        if t + dt > t_max:
            break
        t += dt
        x += 1
        ev += 1
    return x, ev, hit_cap


def _check_p(params: Params) -> float:
    if not 0.0 < params.p <= 1.0:
        raise ParamDomainError(f"continuous embedding needs p in (0, 1], got {params.p}")
    return params.p


def simulate_birth_death(params: Params, horizon: Horizon, rng: RngStream) -> BirthDeathPath:
    """Next-event simulation of one colour from X(0) = 1.

    Stops at the horizon or on extinction.  A user event_budget is a normal
    stopping rule; crossing the 1e8 hard cap raises instead of truncating.
    """
    p = _check_p(params)
    horizon = horizon.validated()
    t_max = -1.0 if horizon.t_max is None else float(horizon.t_max)
    stop_events = -1 if horizon.event_budget is None else int(horizon.event_budget)
    times, pops, x, ev, hit_cap = _bd_path_kernel(rng.generator, p, t_max, stop_events, HARD_EVENT_CAP)
    if hit_cap:
        raise EventBudgetExceededError(f"exceeded {HARD_EVENT_CAP} events before the horizon")
    return BirthDeathPath(times=times.copy(), populations=pops.copy(), extinct=bool(x == 0), params=params)


def population_at(params: Params, t: float, rng: RngStream) -> int:
    """X(t) of one colour without recording the path."""
    p = _check_p(params)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    x, _ev, _births, hit_cap = _bd_final_kernel(rng.generator, p, float(t), -1, HARD_EVENT_CAP)
    if hit_cap:
        raise EventBudgetExceededError(f"exceeded {HARD_EVENT_CAP} events before t={t}")
    return int(x)


def normalized_limit_sample(params: Params, t_eval: float, rng: RngStream) -> float:
    """One finite-t draw of the scaling limit: X(t_eval) * exp(-(2p-1) t_eval).

    Warns when exp(-(2p-1) t_eval) >= 0.05, i.e. when the finite-t bias is
    not yet negligible.
    """
    beta_gamma = params.require_supercritical()
    del beta_gamma
    rate = 2.0 * params.p - 1.0
    if math.exp(-rate * t_eval) >= 0.05:
        warnings.warn(
            f"t_eval={t_eval} is small for p={params.p}: finite-horizon bias "
            f"exp(-(2p-1)t) = {math.exp(-rate * t_eval):.3f} >= 0.05",
            FiniteHorizonWarning,
            stacklevel=2,
        )
    x = population_at(params, t_eval, rng)
    return x * math.exp(-rate * t_eval)


def simulate_total_population(params: Params, t: float, rng: RngStream) -> int:
    """N(t): pure-birth total ball count at per-ball rate p, started from 1."""
    p = _check_p(params)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    x, _ev, hit_cap = _yule_kernel(rng.generator, p, float(t), HARD_EVENT_CAP)
    if hit_cap:
        raise EventBudgetExceededError(f"exceeded {HARD_EVENT_CAP} events before t={t}")
    return int(x)


def variance_formula(params: Params, t: float) -> float:
    """Closed-form Var(X(t)) = e^{2(2p-1)t} (1 - e^{-(2p-1)t}) / (2p-1)."""
    params.require_supercritical()
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    rate = 2.0 * params.p - 1.0
    return math.exp(2.0 * rate * t) * (1.0 - math.exp(-rate * t)) / rate


# ---------------------------------------------------------------------------
# Batch samplers (trial-parallel, one stream per trial)
# ---------------------------------------------------------------------------


def sample_population_at(
    params: Params, t: float, trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """X(t) across independent trials, as an int64 array ordered by trial."""
    vals = map_trials(lambda rng: population_at(params, t, rng), trials, seed, workers)
    return np.asarray(vals, dtype=np.int64)


def sample_normalized_limits(
    params: Params, t_eval: float, trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """Finite-t draws of the one-colour scaling limit across trials."""
    params.require_supercritical()
    rate = 2.0 * params.p - 1.0
    scale = math.exp(-rate * t_eval)
    vals = sample_population_at(params, t_eval, trials, seed, workers)
    return vals.astype(np.float64) * scale


def sample_total_population(
    params: Params, t: float, trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """N(t) across independent trials, as an int64 array ordered by trial."""
    vals = map_trials(lambda rng: simulate_total_population(params, t, rng), trials, seed, workers)
    return np.asarray(vals, dtype=np.int64)


def pooled_birth_fraction(params: Params, trials: int, events_per_trial: int, seed: int) -> tuple[int, int]:
    """(births, events) pooled over trials run to an event budget; each event is
    a Bernoulli(p) birth by construction, independent of the population."""
    p = _check_p(params)
    births = 0
    events = 0
    for i in range(trials):
        rng = RngStream(seed, i)
        _x, ev, b, hit_cap = _bd_final_kernel(rng.generator, p, -1.0, events_per_trial, HARD_EVENT_CAP)
        if hit_cap:
            raise EventBudgetExceededError("hard cap crossed")
        births += int(b)
        events += int(ev)
    return births, events
