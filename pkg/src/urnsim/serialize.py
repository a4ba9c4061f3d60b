"""CSV and JSON serialization with byte-stable output.

Floats are rendered with repr (shortest round-trip), payloads carry no
timestamps, and row order follows trial order, so rerunning a command with
the same seed reproduces files byte for byte at any worker count.
"""

from __future__ import annotations

import csv
import io
import json

from .two_colour import KColourOutcome, TwoColourOutcome
from .urn_continuous import BirthDeathPath
from .urn_discrete import Trajectory

TRAJECTORY_HEADER = ["n", "N", "M", "leader_id", "num_colours"]
OUTCOMES_HEADER = ["trial", "seed", "b", "w", "p", "final_f", "absorbed", "eq_count", "first_eq", "steps"]
BD_PATH_HEADER = ["time", "population"]


def _writer(buf: io.StringIO) -> "csv.writer":
    return csv.writer(buf, lineterminator="\n")


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    wr = _writer(buf)
    wr.writerow(TRAJECTORY_HEADER)
    for i in range(len(traj.ns)):
        wr.writerow(
            [int(traj.ns[i]), int(traj.N[i]), int(traj.M[i]), int(traj.leader_ids[i]), int(traj.num_colours[i])]
        )
    return buf.getvalue()


def trajectory_summary(traj: Trajectory) -> dict:
    return {
        "seed": traj.seed,
        "p": traj.p,
        "steps": traj.steps,
        "leadership_changes": [int(n) for n in traj.leadership_changes],
    }


def outcomes_csv(outcomes: list[TwoColourOutcome], b: int, w: int, p: float, seed: int) -> str:
    buf = io.StringIO()
    wr = _writer(buf)
    wr.writerow(OUTCOMES_HEADER)
    for trial, o in enumerate(outcomes):
        wr.writerow(
            [
                trial,
                seed,
                b,
                w,
                repr(p),
                repr(o.final_f),
                o.absorbed,
                o.equalization_count,
                "" if o.first_equalization_time is None else o.first_equalization_time,
                o.steps,
            ]
        )
    return buf.getvalue()


def two_colour_path_csv(path, trial: int = 0) -> str:
    buf = io.StringIO()
    wr = _writer(buf)
    wr.writerow(["trial", "n", "B", "W"])
    for n in range(path.shape[0]):
        wr.writerow([trial, n, int(path[n, 0]), int(path[n, 1])])
    return buf.getvalue()


def k_colour_csv(outcomes: list[KColourOutcome], p: float, seed: int) -> str:
    k = len(outcomes[0].fractions)
    buf = io.StringIO()
    wr = _writer(buf)
    wr.writerow(["trial", "seed", "p", "steps", "all_extinct"] + [f"f{i}" for i in range(k)])
    for trial, o in enumerate(outcomes):
        wr.writerow(
            [trial, seed, repr(p), o.steps, int(o.all_extinct)] + [repr(f) for f in o.fractions]
        )
    return buf.getvalue()


def bd_path_csv(path: BirthDeathPath) -> str:
    buf = io.StringIO()
    wr = _writer(buf)
    wr.writerow(BD_PATH_HEADER)
    for i in range(len(path.times)):
        wr.writerow([repr(float(path.times[i])), int(path.populations[i])])
    return buf.getvalue()


def bd_summary(path: BirthDeathPath, seed: int, stream_index: int) -> dict:
    return {
        "seed": seed,
        "stream_index": stream_index,
        "p": path.params.p,
        "extinct": path.extinct,
        "final_population": path.final_population,
        "n_events": path.n_events,
    }


def json_dumps(payload) -> str:
    """Deterministic JSON used for every report file."""
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"
