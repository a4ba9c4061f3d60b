"""Shared request handlers: the service endpoints and the CLI both call these."""

from __future__ import annotations

from .. import verify
from ..core import RngStream, sim_params
from ..two_colour import run_k_colour_batch, run_two_colour_batch, run_two_colour_path
from ..urn_continuous import Horizon, simulate_birth_death
from ..urn_discrete import run_trajectory_batch
from . import schemas


def handle_analytic(req: schemas.AnalyticRequest) -> schemas.AnalyticReport:
    return schemas.AnalyticReport(**verify.analytic_report(req.p, req.b, req.w))


def handle_simulate_urn(req: schemas.UrnSimRequest) -> schemas.UrnSimResponse:
    params = sim_params(req.p)
    trajs = run_trajectory_batch(params, req.steps, req.trials, req.seed, workers=req.workers)
    summaries = []
    for traj in trajs:
        summaries.append(
            schemas.TrajectorySummary(
                seed=traj.seed,
                stream_index=traj.stream_index,
                p=traj.p,
                steps=traj.steps,
                leadership_changes=[int(n) for n in traj.leadership_changes],
                final_total=int(traj.N[-1]),
                final_max=int(traj.M[-1]),
                final_leader=int(traj.leader_ids[-1]),
                final_num_colours=int(traj.num_colours[-1]),
                records=[
                    [int(traj.ns[i]), int(traj.N[i]), int(traj.M[i]), int(traj.leader_ids[i]), int(traj.num_colours[i])]
                    for i in range(len(traj.ns))
                ],
            )
        )
    return schemas.UrnSimResponse(seed=req.seed, trajectories=summaries)


def handle_two_colour(req: schemas.TwoColourRequest) -> schemas.TwoColourResponse:
    params = sim_params(req.p)
    outcomes = run_two_colour_batch(
        params, req.b, req.w, req.steps, req.trials, req.seed, workers=req.workers
    )
    rows = [
        schemas.TwoColourOutcomeRow(
            trial=i,
            seed=req.seed,
            b=req.b,
            w=req.w,
            p=req.p,
            final_f=o.final_f,
            absorbed=o.absorbed,
            eq_count=o.equalization_count,
            first_eq=o.first_equalization_time,
            steps=o.steps,
        )
        for i, o in enumerate(outcomes)
    ]
    paths = None
    if req.record_path:
        paths = []
        for i in range(req.trials):
            path = run_two_colour_path(params, req.b, req.w, req.steps, RngStream(req.seed, i))
            paths.append([[int(path[n, 0]), int(path[n, 1])] for n in range(path.shape[0])])
    return schemas.TwoColourResponse(seed=req.seed, outcomes=rows, paths=paths)


def handle_k_colour(req: schemas.KColourRequest) -> schemas.KColourResponse:
    params = sim_params(req.p)
    outcomes = run_k_colour_batch(
        params, req.counts, req.steps, req.trials, req.seed, workers=req.workers
    )
    rows = [
        schemas.KColourOutcomeRow(
            trial=i,
            fractions=[float(f) for f in o.fractions],
            steps=o.steps,
            single_colour_remaining=o.single_colour_remaining,
            all_extinct=o.all_extinct,
        )
        for i, o in enumerate(outcomes)
    ]
    return schemas.KColourResponse(seed=req.seed, outcomes=rows)


def handle_birth_death(req: schemas.BirthDeathRequest) -> schemas.BirthDeathResponse:
    params = sim_params(req.p)
    horizon = Horizon(t_max=req.t_max, event_budget=req.event_budget)
    summaries = []
    paths = [] if req.record_path else None
    for i in range(req.trials):
        path = simulate_birth_death(params, horizon, RngStream(req.seed, i))
        summaries.append(
            schemas.BirthDeathSummaryRow(
                trial=i,
                extinct=path.extinct,
                final_population=path.final_population,
                n_events=path.n_events,
            )
        )
        if paths is not None:
            paths.append(
                {
                    "times": [float(t) for t in path.times],
                    "populations": [int(x) for x in path.populations],
                }
            )
    return schemas.BirthDeathResponse(seed=req.seed, p=req.p, summaries=summaries, paths=paths)


def handle_verify_equalization(req: schemas.VerifyEqualizationRequest) -> schemas.VerifyReport:
    report = verify.verify_equalization(
        req.p, req.b, req.w, req.trials, req.seed, max_steps=req.max_steps, workers=req.workers
    )
    return _to_report(report)


def handle_verify_fixed_point(req: schemas.VerifyFixedPointRequest) -> schemas.VerifyReport:
    return _to_report(verify.verify_fixed_point(req.p, req.n_samples, req.seed))


def handle_verify_exponent(req: schemas.VerifyExponentRequest) -> schemas.VerifyReport:
    return _to_report(
        verify.verify_exponent(
            req.p, req.trajectories, req.steps, req.seed, n_min=req.n_min, workers=req.workers
        )
    )


def handle_verify_dominance(req: schemas.VerifyDominanceRequest) -> schemas.VerifyReport:
    return _to_report(
        verify.verify_dominance(req.p, req.trajectories, req.steps, req.seed, workers=req.workers)
    )


def _to_report(report: dict) -> schemas.VerifyReport:
    return schemas.VerifyReport(
        command=report["command"],
        params=report["params"],
        seed=report["seed"],
        results=report["results"],
        passed=report["pass"],
    )
