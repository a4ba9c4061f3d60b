"""FastAPI application exposing the simulators, closed forms, and verifiers.

Run with:  uvicorn urnsim.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import PlainTextResponse

from .. import __version__, serialize
from ..core import RngStream, sim_params
from ..two_colour import run_k_colour_batch, run_two_colour_batch
from ..urn_continuous import Horizon, simulate_birth_death
from ..urn_discrete import run_trajectory_batch
from . import handlers, schemas

app = FastAPI(title="urnsim", version=__version__)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/analytic", response_model=schemas.AnalyticReport)
def analytic(req: schemas.AnalyticRequest) -> schemas.AnalyticReport:
    return handlers.handle_analytic(req)


@app.post("/simulate/urn")
def simulate_urn(req: schemas.UrnSimRequest):
    if req.format == "csv":
        params = sim_params(req.p)
        trajs = run_trajectory_batch(params, req.steps, req.trials, req.seed, workers=req.workers)
        text = "".join(serialize.trajectory_csv(t) for t in trajs)
        return PlainTextResponse(text, media_type="text/csv")
    return handlers.handle_simulate_urn(req)


@app.post("/simulate/two-colour")
def simulate_two_colour(req: schemas.TwoColourRequest):
    if req.format == "csv":
        params = sim_params(req.p)
        outcomes = run_two_colour_batch(
            params, req.b, req.w, req.steps, req.trials, req.seed, workers=req.workers
        )
        text = serialize.outcomes_csv(outcomes, req.b, req.w, req.p, req.seed)
        return PlainTextResponse(text, media_type="text/csv")
    return handlers.handle_two_colour(req)


@app.post("/simulate/k-colour")
def simulate_k_colour(req: schemas.KColourRequest):
    if req.format == "csv":
        params = sim_params(req.p)
        outcomes = run_k_colour_batch(
            params, req.counts, req.steps, req.trials, req.seed, workers=req.workers
        )
        return PlainTextResponse(
            serialize.k_colour_csv(outcomes, req.p, req.seed), media_type="text/csv"
        )
    return handlers.handle_k_colour(req)


@app.post("/simulate/birth-death")
def simulate_birth_death_endpoint(req: schemas.BirthDeathRequest):
    if req.format == "csv":
        params = sim_params(req.p)
        horizon = Horizon(t_max=req.t_max, event_budget=req.event_budget)
        parts = []
        for i in range(req.trials):
            path = simulate_birth_death(params, horizon, RngStream(req.seed, i))
            parts.append(serialize.bd_path_csv(path))
        return PlainTextResponse("".join(parts), media_type="text/csv")
    return handlers.handle_birth_death(req)


@app.post("/verify/equalization")
def verify_equalization(req: schemas.VerifyEqualizationRequest) -> dict:
    return handlers.handle_verify_equalization(req).as_json_dict()


@app.post("/verify/fixed-point")
def verify_fixed_point(req: schemas.VerifyFixedPointRequest) -> dict:
    return handlers.handle_verify_fixed_point(req).as_json_dict()


@app.post("/verify/exponent")
def verify_exponent(req: schemas.VerifyExponentRequest) -> dict:
    return handlers.handle_verify_exponent(req).as_json_dict()


@app.post("/verify/dominance")
def verify_dominance(req: schemas.VerifyDominanceRequest) -> dict:
    return handlers.handle_verify_dominance(req).as_json_dict()
