"""Command-line driver.  Every randomized command requires an explicit --seed;
rerunning with identical flags reproduces output files byte for byte at any
worker count.

Exit codes: 0 success, 1 failed verification gate, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import serialize
from .core import RngStream, sim_params
from .errors import UrnsimError
from .service import handlers, schemas
from .two_colour import run_k_colour_batch, run_two_colour_batch, run_two_colour_path
from .urn_continuous import Horizon, simulate_birth_death
from .urn_discrete import run_trajectory_batch


def _read_config(path: str) -> dict:
    """Flat key=value file mirroring the flags (hyphens and underscores alike)."""
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _merge_config(ctx: click.Context, config: str | None, **flags):
    """Explicit flags win; config fills parameters left at their defaults."""
    if not config:
        return flags
    file_values = _read_config(config)
    merged = dict(flags)
    for name, value in flags.items():
        src = ctx.get_parameter_source(name)
        if src == click.core.ParameterSource.COMMANDLINE:
            continue
        if name in file_values:
            raw = file_values[name]
            if value is not None and not isinstance(value, str):
                merged[name] = type(value)(raw)
            else:
                try:
                    merged[name] = int(raw)
                except ValueError:
                    try:
                        merged[name] = float(raw)
                    except ValueError:
                        merged[name] = raw
    unknown = set(file_values) - set(flags)
    if unknown:
        raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
    return merged


def _require(value, flag: str):
    if value is None:
        raise click.UsageError(f"missing required option {flag}")
    return value


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _probability(value: float, flag: str) -> float:
    if not 0.0 <= value <= 1.0:
        raise click.UsageError(f"{flag} must lie in [0, 1], got {value}")
    return value


config_option = click.option("--config", type=click.Path(exists=True), default=None, help="Flat key=value file mirroring the flags.")


@click.group()
def main() -> None:
    """Simulation, closed-form evaluation, and verification for the recolouring urn."""


@main.command("simulate-urn")
@click.option("--p", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--trials", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Trajectory CSV (suffixed per trial when trials > 1).")
@click.option("--summary-out", type=click.Path(), default=None, help="JSON summary with leadership changes.")
@config_option
@click.pass_context
def simulate_urn(ctx, p, steps, trials, seed, workers, out, summary_out, config):
    """Run the infinite-colour urn and write trajectory CSV / JSON summary."""
    opts = _merge_config(ctx, config, p=p, steps=steps, trials=trials, seed=seed, workers=workers)
    p = _probability(_require(opts["p"], "--p"), "--p")
    steps = _require(opts["steps"], "--steps")
    seed = _require(opts["seed"], "--seed")
    trials, workers = opts["trials"], opts["workers"]
    trajs = run_trajectory_batch(sim_params(p), steps, trials, seed, workers=workers)
    if out is None and summary_out is None:
        out = "-"
    if out is not None:
        if out == "-":
            for traj in trajs:
                click.echo(serialize.trajectory_csv(traj), nl=False)
        elif trials == 1:
            Path(out).write_text(serialize.trajectory_csv(trajs[0]))
        else:
            base = Path(out)
            for i, traj in enumerate(trajs):
                base.with_name(f"{base.stem}_{i:04d}{base.suffix}").write_text(
                    serialize.trajectory_csv(traj)
                )
    if summary_out is not None:
        summary = [serialize.trajectory_summary(t) for t in trajs]
        payload = summary[0] if trials == 1 else {"trials": summary}
        Path(summary_out).write_text(serialize.json_dumps(payload))


@main.command("two-colour")
@click.option("--p", type=float, default=None)
@click.option("--b", type=int, default=None)
@click.option("--w", type=int, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--trials", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Outcome batch CSV (default stdout).")
@click.option("--path-out", type=click.Path(), default=None, help="Per-step (trial,n,B,W) CSV; trials <= 10.")
@config_option
@click.pass_context
def two_colour(ctx, p, b, w, steps, trials, seed, workers, out, path_out, config):
    """Run the two-colour projection and write the outcome batch CSV."""
    opts = _merge_config(ctx, config, p=p, b=b, w=w, steps=steps, trials=trials, seed=seed, workers=workers)
    p = _probability(_require(opts["p"], "--p"), "--p")
    b, w = _require(opts["b"], "--b"), _require(opts["w"], "--w")
    steps = _require(opts["steps"], "--steps")
    seed = _require(opts["seed"], "--seed")
    trials, workers = opts["trials"], opts["workers"]
    if b < 1 or w < 1:
        raise click.UsageError("--b and --w must be >= 1")
    params = sim_params(p)
    outcomes = run_two_colour_batch(params, b, w, steps, trials, seed, workers=workers)
    _emit(serialize.outcomes_csv(outcomes, b, w, p, seed), out)
    if path_out is not None:
        if trials > 10:
            raise click.UsageError("--path-out is limited to --trials <= 10")
        chunks = []
        for i in range(trials):
            path = run_two_colour_path(params, b, w, steps, RngStream(seed, i))
            text = serialize.two_colour_path_csv(path, trial=i)
            chunks.append(text if i == 0 else text.split("\n", 1)[1])
        Path(path_out).write_text("".join(chunks))


@main.command("k-colour")
@click.option("--p", type=float, default=None)
@click.option("--counts", type=str, default=None, help="Comma-separated initial counts, e.g. 1,1,1.")
@click.option("--steps", type=int, default=None)
@click.option("--trials", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@config_option
@click.pass_context
def k_colour(ctx, p, counts, steps, trials, seed, workers, out, config):
    """Run the k-colour projection and write final fractions per trial."""
    opts = _merge_config(ctx, config, p=p, counts=counts, steps=steps, trials=trials, seed=seed, workers=workers)
    p = _probability(_require(opts["p"], "--p"), "--p")
    counts = _require(opts["counts"], "--counts")
    steps = _require(opts["steps"], "--steps")
    seed = _require(opts["seed"], "--seed")
    trials, workers = opts["trials"], opts["workers"]
    try:
        parsed = [int(c) for c in str(counts).split(",")]
    except ValueError:
        raise click.UsageError(f"--counts must be comma-separated integers, got {counts!r}")
    if len(parsed) < 2 or any(c < 1 for c in parsed):
        raise click.UsageError("--counts needs at least two entries, all >= 1")
    outcomes = run_k_colour_batch(sim_params(p), parsed, steps, trials, seed, workers=workers)
    _emit(serialize.k_colour_csv(outcomes, p, seed), out)


@main.command("birth-death")
@click.option("--p", type=float, default=None)
@click.option("--t-max", type=float, default=None)
@click.option("--event-budget", type=int, default=None)
@click.option("--trials", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="Path CSV (time,population; suffixed per trial when trials > 1).")
@click.option("--summary-out", type=click.Path(), default=None, help="JSON with extinction flag and final population.")
@config_option
@click.pass_context
def birth_death(ctx, p, t_max, event_budget, trials, seed, out, summary_out, config):
    """Simulate one-colour birth-death paths event by event."""
    opts = _merge_config(ctx, config, p=p, t_max=t_max, event_budget=event_budget, trials=trials, seed=seed)
    p = _require(opts["p"], "--p")
    seed = _require(opts["seed"], "--seed")
    t_max, event_budget, trials = opts["t_max"], opts["event_budget"], opts["trials"]
    if not 0.0 < p <= 1.0:
        raise click.UsageError(f"--p must lie in (0, 1], got {p}")
    if t_max is None and event_budget is None:
        raise click.UsageError("set --t-max and/or --event-budget")
    params = sim_params(p)
    horizon = Horizon(t_max=t_max, event_budget=event_budget)
    paths = [simulate_birth_death(params, horizon, RngStream(seed, i)) for i in range(trials)]
    if out is None and summary_out is None:
        out = "-"
    if out is not None:
        if out == "-":
            for path in paths:
                click.echo(serialize.bd_path_csv(path), nl=False)
        elif trials == 1:
            Path(out).write_text(serialize.bd_path_csv(paths[0]))
        else:
            base = Path(out)
            for i, path in enumerate(paths):
                base.with_name(f"{base.stem}_{i:04d}{base.suffix}").write_text(
                    serialize.bd_path_csv(path)
                )
    if summary_out is not None:
        rows = [serialize.bd_summary(path, seed, i) for i, path in enumerate(paths)]
        payload = rows[0] if trials == 1 else {"trials": rows}
        Path(summary_out).write_text(serialize.json_dumps(payload))


@main.command("analytic")
@click.option("--p", type=float, default=None)
@click.option("--b", type=int, default=None)
@click.option("--w", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@config_option
@click.pass_context
def analytic_cmd(ctx, p, b, w, out, config):
    """Evaluate the closed forms: mixture weights, CDF at 1/2, equalization
    probability (needs b > w, null otherwise), and the (b, 1) bound."""
    opts = _merge_config(ctx, config, p=p, b=b, w=w)
    p, b, w = _require(opts["p"], "--p"), _require(opts["b"], "--b"), _require(opts["w"], "--w")
    if not 0.5 < p <= 1.0:
        raise click.UsageError(f"--p must lie in (1/2, 1] for the closed forms, got {p}")
    if b < 1 or w < 1:
        raise click.UsageError("--b and --w must be >= 1")
    req = schemas.AnalyticRequest(p=p, b=b, w=w)
    report = handlers.handle_analytic(req)
    _emit(serialize.json_dumps(report.model_dump()), out)


@main.group()
def verify() -> None:
    """Verification gates; exit status 1 when a gate fails."""


def _finish_verify(report: schemas.VerifyReport, out: str | None) -> None:
    _emit(serialize.json_dumps(report.as_json_dict()), out)
    if not report.passed:
        sys.exit(1)


@verify.command("equalization")
@click.option("--p", type=float, required=True)
@click.option("--b", type=int, required=True)
@click.option("--w", type=int, required=True)
@click.option("--trials", type=int, required=True)
@click.option("--max-steps", type=int, default=10**5, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def verify_equalization_cmd(p, b, w, trials, max_steps, seed, workers, out):
    """Wilson 99% interval against the closed-form equalization probability."""
    try:
        req = schemas.VerifyEqualizationRequest(
            p=p, b=b, w=w, trials=trials, max_steps=max_steps, seed=seed, workers=workers
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _finish_verify(handlers.handle_verify_equalization(req), out)


@verify.command("fixed-point")
@click.option("--p", type=float, required=True)
@click.option("--n-samples", type=int, default=10**5, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(), default=None)
def verify_fixed_point_cmd(p, n_samples, seed, out):
    """Distributional fixed point: KS match, mean preservation, contraction."""
    try:
        req = schemas.VerifyFixedPointRequest(p=p, n_samples=n_samples, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _finish_verify(handlers.handle_verify_fixed_point(req), out)


@verify.command("exponent")
@click.option("--p", type=float, required=True)
@click.option("--trajectories", type=int, default=50, show_default=True)
@click.option("--steps", type=int, default=10**6, show_default=True)
@click.option("--n-min", type=int, default=10**4, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def verify_exponent_cmd(p, trajectories, steps, n_min, seed, workers, out):
    """Pooled log-log growth slope against the closed-form exponent."""
    try:
        req = schemas.VerifyExponentRequest(
            p=p, trajectories=trajectories, steps=steps, n_min=n_min, seed=seed, workers=workers
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _finish_verify(handlers.handle_verify_exponent(req), out)


@verify.command("dominance")
@click.option("--p", type=float, required=True)
@click.option("--trajectories", type=int, default=100, show_default=True)
@click.option("--steps", type=int, default=10**5, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def verify_dominance_cmd(p, trajectories, steps, seed, workers, out):
    """Leadership stays quiet over the final half horizon in >= 90% of runs."""
    try:
        req = schemas.VerifyDominanceRequest(
            p=p, trajectories=trajectories, steps=steps, seed=seed, workers=workers
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _finish_verify(handlers.handle_verify_dominance(req), out)


def entrypoint() -> None:  # pragma: no cover - console-script shim
    try:
        main(standalone_mode=True)
    except UrnsimError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":  # pragma: no cover
    entrypoint()
