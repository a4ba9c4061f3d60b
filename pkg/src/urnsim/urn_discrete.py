"""The infinite-colour discrete urn with exact leader tracking.

Each step draws a ball uniformly at random; with probability p its colour
gains a ball (the total grows by one), with probability 1 - p the ball is
reassigned a brand-new colour id (the total is unchanged and the old colour
may go extinct).

Leadership ties break toward the smallest colour id (birth order).  The
leader is maintained in O(1) amortized time from a per-count histogram plus
intrusive per-count membership lists: the max count moves by at most one per
step, and only the (sparse) top tiers are ever scanned, exactly when the
leader itself loses a ball.

The per-step Python implementation and the batched numba kernel consume one
uniform per step with the identical mapping, so a fixed stream yields the
same event sequence through either path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import Params, RngStream, map_trials
from .errors import DomainError

EVENT_DUPLICATION = "duplication"
EVENT_RECOLOUR = "recolour"


@dataclass(frozen=True)
class Event:
    kind: str
    n: int
    colour: int
    new_colour: int | None
    leadership_changed: bool
    leader_id: int


class UrnState:
    """Mutable urn state: ball array, live-colour counts, and leader bookkeeping."""

    __slots__ = ("balls", "counts", "next_colour_id", "n", "leader_id", "_max_count", "_tiers")

    def __init__(self):
        self.balls: list[int] = [0]
        self.counts: dict[int, int] = {0: 1}
        self.next_colour_id = 1
        self.n = 0
        self.leader_id = 0
        self._max_count = 1
        self._tiers: dict[int, set[int]] = {1: {0}}

    @property
    def N(self) -> int:
        return len(self.balls)

    @property
    def num_colours(self) -> int:
        return len(self.counts)

    @property
    def leader(self) -> tuple[int, int]:
        return (self.leader_id, self.counts[self.leader_id])

    @property
    def count_histogram(self) -> dict[int, int]:
        return {j: len(ids) for j, ids in self._tiers.items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, UrnState):
            return NotImplemented
        return (
            self.balls == other.balls
            and self.counts == other.counts
            and self.next_colour_id == other.next_colour_id
            and self.n == other.n
            and self.leader_id == other.leader_id
        )

    def validate(self) -> None:
        """Assert every structural invariant; used by tests and debug paths."""
        assert sum(self.counts.values()) == self.N, "counts must sum to the ball total"
        assert all(c >= 1 for c in self.counts.values()), "extinct colours must be removed"
        hist = self.count_histogram
        assert sum(j * m for j, m in hist.items()) == self.N
        assert sum(hist.values()) == self.num_colours
        max_count = max(self.counts.values())
        assert self._max_count == max_count
        assert self.counts[self.leader_id] == max_count
        assert self.leader_id == min(c for c, v in self.counts.items() if v == max_count)
        for j, ids in self._tiers.items():
            assert all(self.counts[c] == j for c in ids)


def new_urn() -> UrnState:
    """Fresh urn: one ball of colour 0."""
    return UrnState()


def _tier_move(state: UrnState, c: int, j_from: int, j_to: int) -> None:
    tier = state._tiers[j_from]
    tier.discard(c)
    if not tier:
        del state._tiers[j_from]
    if j_to >= 1:
        state._tiers.setdefault(j_to, set()).add(c)


def step(state: UrnState, params: Params, rng) -> Event:
    """Advance the urn one step in place and report what happened.

    rng needs only a .random() method, so tests can drive scripted draws.
    """
    p = params.p
    N = len(state.balls)
    u = rng.random()
    state.n += 1
    old_leader = state.leader_id
    if u < p:
        slot = min(int(u / p * N), N - 1)
        c = state.balls[slot]
        state.balls.append(c)
        j = state.counts[c]
        state.counts[c] = j + 1
        _tier_move(state, c, j, j + 1)
        if j + 1 > state._max_count:
            state._max_count = j + 1
            state.leader_id = c
        elif j + 1 == state._max_count and c < state.leader_id:
            state.leader_id = c
        return Event(
            kind=EVENT_DUPLICATION,
            n=state.n,
            colour=c,
            new_colour=None,
            leadership_changed=state.leader_id != old_leader,
            leader_id=state.leader_id,
        )
    slot = min(int((u - p) / (1.0 - p) * N), N - 1)
    c = state.balls[slot]
    d = state.next_colour_id
    state.next_colour_id = d + 1
    state.balls[slot] = d
    j = state.counts[c]
    if j == 1:
        del state.counts[c]
    else:
        state.counts[c] = j - 1
    _tier_move(state, c, j, j - 1)
    state.counts[d] = 1
    state._tiers.setdefault(1, set()).add(d)
    if c == old_leader:
        M = state._max_count
        tier = state._tiers.get(M)
        if tier:
            state.leader_id = min(tier)
        else:
            if M > 1:
                state._max_count = M - 1
            state.leader_id = min(state._tiers[state._max_count])
    return Event(
        kind=EVENT_RECOLOUR,
        n=state.n,
        colour=c,
        new_colour=d,
        leadership_changed=state.leader_id != old_leader,
        leader_id=state.leader_id,
    )


def leader(state: UrnState) -> tuple[int, int]:
    """Current (colour id, count) under the smallest-birth-index tie rule."""
    return state.leader


# ---------------------------------------------------------------------------
# Batched trajectory kernel
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _urn_kernel(gen, p, steps, record_ns, records, check_records):  # pragma: no cover
    cap = steps + 2
    balls = np.zeros(steps + 1, dtype=np.int64)
    counts = np.zeros(steps + 2, dtype=np.int64)
    hist = np.zeros(cap, dtype=np.int64)
    tier_head = np.full(cap, -1, dtype=np.int64)
    nxt = np.full(steps + 2, -1, dtype=np.int64)
    prv = np.full(steps + 2, -1, dtype=np.int64)

    changes = np.empty(256, dtype=np.int64)
    n_changes = 0

    balls[0] = 0
    counts[0] = 1
    hist[1] = 1
    tier_head[1] = 0
    N = 1
    M = 1
    leader_id = 0
    next_colour = 1
    num_colours = 1
    ok = True

    ri = 0
    n_rec = record_ns.shape[0]
    if ri < n_rec and record_ns[ri] == 0:
        records[ri, 0] = N
        records[ri, 1] = M
        records[ri, 2] = leader_id
        records[ri, 3] = num_colours
        ri += 1

    for n in range(1, steps + 1):
        u = gen.random()
        old_leader = leader_id
        if u < p:
            slot = np.int64(u / p * N)
            if slot > N - 1:
                slot = N - 1
            c = balls[slot]
            balls[N] = c
            N += 1
            j = counts[c]
            counts[c] = j + 1
            # unlink c from tier j
            if prv[c] >= 0:
                nxt[prv[c]] = nxt[c]
            else:
                tier_head[j] = nxt[c]
            if nxt[c] >= 0:
                prv[nxt[c]] = prv[c]
            hist[j] -= 1
            # link c into tier j+1
            h = tier_head[j + 1]
            nxt[c] = h
            prv[c] = -1
            if h >= 0:
                prv[h] = c
            tier_head[j + 1] = c
            hist[j + 1] += 1
            if j + 1 > M:
                M = j + 1
                leader_id = c
            elif j + 1 == M and c < leader_id:
                leader_id = c
        else:
            slot = np.int64((u - p) / (1.0 - p) * N)
            if slot > N - 1:
                slot = N - 1
            c = balls[slot]
            d = next_colour
            next_colour += 1
            balls[slot] = d
            j = counts[c]
            counts[c] = j - 1
            if j == 1:
                num_colours -= 1
            # unlink c from tier j
            if prv[c] >= 0:
                nxt[prv[c]] = nxt[c]
            else:
                tier_head[j] = nxt[c]
            if nxt[c] >= 0:
                prv[nxt[c]] = prv[c]
            hist[j] -= 1
            if j - 1 >= 1:
                h = tier_head[j - 1]
                nxt[c] = h
                prv[c] = -1
                if h >= 0:
                    prv[h] = c
                tier_head[j - 1] = c
                hist[j - 1] += 1
            # birth of d at count 1
            counts[d] = 1
            num_colours += 1
            h = tier_head[1]
            nxt[d] = h
            prv[d] = -1
            if h >= 0:
                prv[h] = d
            tier_head[1] = d
            hist[1] += 1
            if c == old_leader:
                if hist[M] > 0:
                    best = tier_head[M]
                    e = nxt[best]
                    while e >= 0:
                        if e < best:
                            best = e
                        e = nxt[e]
                    leader_id = best
                else:
                    if M > 1:
                        M -= 1
                    best = tier_head[M]
                    e = nxt[best]
                    while e >= 0:
                        if e < best:
                            best = e
                        e = nxt[e]
                    leader_id = best
        if leader_id != old_leader:
            if n_changes == changes.shape[0]:
                bigger = np.empty(changes.shape[0] * 2, dtype=np.int64)
                bigger[: changes.shape[0]] = changes
                changes = bigger
            changes[n_changes] = n
            n_changes += 1
        if ri < n_rec and record_ns[ri] == n:
            records[ri, 0] = N
            records[ri, 1] = M
            records[ri, 2] = leader_id
            records[ri, 3] = num_colours
            if check_records:
                tot = np.int64(0)
                for i in range(next_colour):
                    tot += counts[i]
                if tot != N:
                    ok = False
            ri += 1

    return changes[:n_changes], N, M, leader_id, num_colours, next_colour, ok


@dataclass(frozen=True)
class Trajectory:
    """Recorded time series of one urn run plus the full leadership-change log."""

    seed: int
    stream_index: int
    p: float
    steps: int
    ns: np.ndarray
    N: np.ndarray
    M: np.ndarray
    leader_ids: np.ndarray
    num_colours: np.ndarray
    leadership_changes: np.ndarray = field(repr=False)

    @property
    def last_leadership_change(self) -> int:
        """Step index of the last change, 0 if leadership never moved."""
        return int(self.leadership_changes[-1]) if len(self.leadership_changes) else 0


def default_record_schedule(steps: int) -> np.ndarray:
    """Geometric spacing ceil(1.1^k) capped at steps, plus the endpoints."""
    ns = {0, steps}
    x = 1.0
    while True:
        v = math.ceil(x)
        if v >= steps:
            break
        ns.add(v)
        x *= 1.1
    return np.array(sorted(ns), dtype=np.int64)


def run_trajectory(
    params: Params,
    steps: int,
    rng: RngStream,
    record_schedule: np.ndarray | None = None,
    check_records: bool = True,
) -> Trajectory:
    """Run the urn for the given step count, recording at the schedule points.

    leadership_changes is complete: it is computed from every step, not only
    the recorded ones.
    """
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    if record_schedule is None:
        record_ns = default_record_schedule(steps)
    else:
        record_ns = np.asarray(record_schedule, dtype=np.int64)
        if len(record_ns) == 0 or np.any(np.diff(record_ns) <= 0):
            raise DomainError("record_schedule must be strictly increasing and non-empty")
        if record_ns[0] < 0 or record_ns[-1] > steps:
            raise DomainError("record_schedule entries must lie in [0, steps]")
    records = np.zeros((len(record_ns), 4), dtype=np.int64)
    changes, _N, _M, _leader, _num, _next, ok = _urn_kernel(
        rng.generator, params.p, steps, record_ns, records, check_records
    )
    if not ok:
        raise AssertionError("conservation check failed at a record point")
    return Trajectory(
        seed=rng.seed,
        stream_index=rng.stream_index,
        p=params.p,
        steps=steps,
        ns=record_ns,
        N=records[:, 0].copy(),
        M=records[:, 1].copy(),
        leader_ids=records[:, 2].copy(),
        num_colours=records[:, 3].copy(),
        leadership_changes=changes.copy(),
    )


def run_trajectory_batch(
    params: Params,
    steps: int,
    trials: int,
    seed: int,
    record_schedule: np.ndarray | None = None,
    workers: int = 1,
) -> list[Trajectory]:
    """Trial i uses RngStream(seed, i); results are ordered by trial index."""
    return map_trials(
        lambda rng: run_trajectory(params, steps, rng, record_schedule), trials, seed, workers
    )
