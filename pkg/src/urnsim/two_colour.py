"""Two-colour and k-colour projections of the urn.

One step draws a ball uniformly; with probability p the drawn colour gains a
ball, with probability 1 - p the ball is removed from the tracked set.  The
two-colour chain freezes as soon as either colour dies out.

Both the per-step Python path and the batched numba kernels consume exactly
one uniform per step and map it identically, so a fixed stream produces the
same trajectory through either path (and run_k_colour with k=2 reproduces
run_two_colour draw for draw).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Params, RngStream, map_trials
from .errors import AbsorbedStateError, DomainError

ABSORB_NONE = "none"
ABSORB_AT_ZERO = "at_zero"  # B hit 0, fraction 0
ABSORB_AT_ONE = "at_one"  # W hit 0, fraction 1

_ABSORB_BY_CODE = (ABSORB_NONE, ABSORB_AT_ZERO, ABSORB_AT_ONE)


@dataclass
class TwoColourState:
    B: int
    W: int
    n: int = 0
    absorbed: str = ABSORB_NONE


@dataclass(frozen=True)
class TwoColourOutcome:
    final_f: float
    absorbed: str
    absorb_time: int | None
    equalization_count: int
    first_equalization_time: int | None
    last_equalization_time: int | None
    steps: int


def move_probabilities(state: TwoColourState, params: Params) -> tuple[float, float, float, float]:
    """Probabilities of the four moves (B+1, W+1, B-1, W-1) from state."""
    S = state.B + state.W
    if S < 1:
        raise DomainError("state must hold at least one ball")
    p = params.p
    fb = state.B / S
    fw = state.W / S
    return (p * fb, p * fw, (1.0 - p) * fb, (1.0 - p) * fw)


def step_two_colour(state: TwoColourState, params: Params, rng: RngStream) -> TwoColourState:
    """Advance one step; raises AbsorbedStateError on a frozen state."""
    if state.absorbed != ABSORB_NONE:
        raise AbsorbedStateError(f"state absorbed ({state.absorbed}) at n={state.n}")
    if state.B + state.W < 1:
        raise DomainError("state must hold at least one ball")
    B, W = state.B, state.W
    S = B + W
    p = params.p
    u = rng.random()
    # One uniform decides both the event type and the colour: the scaled
    # remainder u/p (resp. (u-p)/(1-p)) is again uniform on [0, 1).
    if u < p:
        if u / p * S < B:
            B += 1
        else:
            W += 1
    else:
        if (u - p) / (1.0 - p) * S < B:
            B -= 1
        else:
            W -= 1
    absorbed = ABSORB_NONE
    if B == 0:
        absorbed = ABSORB_AT_ZERO
    elif W == 0:
        absorbed = ABSORB_AT_ONE
    return TwoColourState(B=B, W=W, n=state.n + 1, absorbed=absorbed)


@njit(cache=True, nogil=True)
def _two_colour_kernel(gen, p, b, w, max_steps):  # pragma: no cover - exercised via wrappers
    B = b
    W = w
    eq_count = 0
    first_eq = -1
    last_eq = -1
    absorbed = 0
    absorb_time = -1
    n = 0
    while n < max_steps:
        n += 1
        S = B + W
        u = gen.random()
        if u < p:
            if u / p * S < B:
                B += 1
            else:
                W += 1
        else:
            if (u - p) / (1.0 - p) * S < B:
                B -= 1
            else:
                W -= 1
        if B == W:
            eq_count += 1
            last_eq = n
            if first_eq < 0:
                first_eq = n
        if B == 0:
            absorbed = 1
            absorb_time = n
            break
        if W == 0:
            absorbed = 2
            absorb_time = n
            break
    return B, W, absorbed, absorb_time, eq_count, first_eq, last_eq, n


@njit(cache=True, nogil=True)
def _two_colour_path_kernel(gen, p, b, w, max_steps, path):  # pragma: no cover
    B = b
    W = w
    path[0, 0] = B
    path[0, 1] = W
    n = 0
    absorbed = 0
    while n < max_steps:
        n += 1
        S = B + W
        u = gen.random()
        if u < p:
            if u / p * S < B:
                B += 1
            else:
                W += 1
        else:
            if (u - p) / (1.0 - p) * S < B:
                B -= 1
            else:
                W -= 1
        path[n, 0] = B
        path[n, 1] = W
        if B == 0:
            absorbed = 1
            break
        if W == 0:
            absorbed = 2
            break
    return absorbed, n


@njit(cache=True, nogil=True)
def _k_colour_kernel(gen, p, counts, max_steps):  # pragma: no cover
    k = counts.shape[0]
    S = 0
    alive = 0
    for i in range(k):
        S += counts[i]
        if counts[i] > 0:
            alive += 1
    n = 0
    while n < max_steps and alive > 1 and S > 0:
        n += 1
        u = gen.random()
        if u < p:
            v = u / p * S
            acc = 0
            for c in range(k):
                acc += counts[c]
                if v < acc:
                    counts[c] += 1
                    break
            S += 1
        else:
            v = (u - p) / (1.0 - p) * S
            acc = 0
            for c in range(k):
                acc += counts[c]
                if v < acc:
                    counts[c] -= 1
                    if counts[c] == 0:
                        alive -= 1
                    break
            S -= 1
    return n, S, alive


def _outcome_from_kernel(b, w, raw) -> TwoColourOutcome:
    B, W, absorbed, absorb_time, eq_count, first_eq, last_eq, n = raw
    final_f = B / (B + W)
    first = None
    if b == w:
        first = 0  # the start sits on the diagonal; counted separately from n >= 1 events
    if first_eq >= 0 and first is None:
        first = int(first_eq)
    return TwoColourOutcome(
        final_f=float(final_f),
        absorbed=_ABSORB_BY_CODE[absorbed],
        absorb_time=int(absorb_time) if absorb_time >= 0 else None,
        equalization_count=int(eq_count),
        first_equalization_time=first,
        last_equalization_time=int(last_eq) if last_eq >= 0 else None,
        steps=int(n),
    )


def run_two_colour(
    params: Params, b: int, w: int, max_steps: int, rng: RngStream
) -> TwoColourOutcome:
    """Run from (b, w) until absorption or max_steps.

    Trials that neither absorb nor run out of budget do not exist; the
    unabsorbed case is reported via absorbed == "none" with the fraction at
    max_steps as the limit proxy.
    """
    if b < 1 or w < 1:
        raise DomainError(f"initial counts must be >= 1, got b={b}, w={w}")
    if max_steps < 1:
        raise DomainError(f"max_steps must be >= 1, got {max_steps}")
    raw = _two_colour_kernel(rng.generator, params.p, b, w, max_steps)
    return _outcome_from_kernel(b, w, raw)


def run_two_colour_batch(
    params: Params,
    b: int,
    w: int,
    max_steps: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[TwoColourOutcome]:
    """Trial i uses RngStream(seed, i); results are ordered by trial index."""
    return map_trials(
        lambda rng: run_two_colour(params, b, w, max_steps, rng), trials, seed, workers
    )


def run_two_colour_path(
    params: Params, b: int, w: int, max_steps: int, rng: RngStream
) -> np.ndarray:
    """Per-step (B, W) path as an int64 array of shape (steps+1, 2), row 0 = start."""
    if b < 1 or w < 1:
        raise DomainError(f"initial counts must be >= 1, got b={b}, w={w}")
    path = np.zeros((max_steps + 1, 2), dtype=np.int64)
    _absorbed, n = _two_colour_path_kernel(rng.generator, params.p, b, w, max_steps, path)
    return path[: n + 1]


@dataclass(frozen=True)
class KColourOutcome:
    fractions: tuple[float, ...]
    steps: int
    single_colour_remaining: bool
    all_extinct: bool


def run_k_colour(
    params: Params, initial_counts: list[int], max_steps: int, rng: RngStream
) -> KColourOutcome:
    """Same dynamics over k colours; stops when one colour is left (or budget).

    Extinct colours report fraction 0; should every ball disappear the run is
    flagged all_extinct instead of dividing by zero.
    """
    if len(initial_counts) < 2:
        raise DomainError("need at least 2 colours")
    if any(c < 1 for c in initial_counts):
        raise DomainError("all initial counts must be >= 1")
    counts = np.asarray(initial_counts, dtype=np.int64).copy()
    n, S, alive = _k_colour_kernel(rng.generator, params.p, counts, max_steps)
    if S > 0:
        fractions = tuple(float(c) / float(S) for c in counts)
    else:
        fractions = tuple(0.0 for _ in counts)
    return KColourOutcome(
        fractions=fractions,
        steps=int(n),
        single_colour_remaining=bool(alive == 1),
        all_extinct=bool(S == 0),
    )


def run_k_colour_batch(
    params: Params,
    initial_counts: list[int],
    max_steps: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[KColourOutcome]:
    return map_trials(
        lambda rng: run_k_colour(params, initial_counts, max_steps, rng), trials, seed, workers
    )
