"""Verification pipelines comparing Monte Carlo estimates with closed forms.

Each pipeline returns a plain report dict with the fixed top-level shape
{command, params, seed, results, pass}; entry points exit 0 iff every gate
inside the report passed.
"""

from __future__ import annotations

import math

import numpy as np

from . import analytic
from .core import Params, RngStream, derive_params, sim_params
from .estimators import (
    KS_COEFF_99,
    dominance_report,
    empirical_wasserstein1,
    growth_exponent,
    ks_two_sample,
    mc_equalization,
)
from .urn_discrete import run_trajectory_batch

EXACT_SLOPE_TOL = 1e-10
SLOPE_HALF_WIDTH = 0.05
W1_RATIO_SLACK = 0.05
MEAN_TOL = 0.01


def analytic_report(p: float, b: int, w: int) -> dict:
    """Closed-form summary {b, w, p, r0, rstar, r1, F_half, P_eq, bound}.

    P_eq needs b > w and is null otherwise; bound is the (b, 1) catch-up
    bound 2 (2p)^{-b}.
    """
    params = derive_params(p)
    r0, rstar, r1 = analytic.mixture_weights(b, w, params)
    f_half = analytic.limit_cdf(b, w, params, 0.5)
    p_eq = analytic.equalization_prob(b, w, params) if b > w else None
    return {
        "b": b,
        "w": w,
        "p": p,
        "r0": r0,
        "rstar": rstar,
        "r1": r1,
        "F_half": f_half,
        "P_eq": p_eq,
        "bound": analytic.equalization_bound(b, params),
    }


def _report(command: str, params: dict, seed: int, results: dict, passed: bool) -> dict:
    return {"command": command, "params": params, "seed": seed, "results": results, "pass": passed}


def verify_equalization(
    p: float, b: int, w: int, trials: int, seed: int, max_steps: int = 10**5, workers: int = 1
) -> dict:
    """Gate: the 99% Wilson interval covers the closed-form equalization
    probability; for w = 1 the point estimate must also respect the
    exponential bound."""
    params = derive_params(p)
    target = analytic.equalization_prob(b, w, params)
    est = mc_equalization(params, b, w, trials, max_steps=max_steps, seed=seed, workers=workers)
    covers = est.covers(target)
    results: dict = {
        "estimate": est.point,
        "ci": [est.ci_low, est.ci_high],
        "analytic": target,
        "covers": covers,
        "trials": trials,
        "max_steps": max_steps,
    }
    passed = covers
    if w == 1:
        bound = analytic.equalization_bound(b, params)
        respects = est.point <= bound
        results["bound"] = bound
        results["respects_bound"] = respects
        passed = passed and respects
    return _report(
        "verify equalization", {"p": p, "b": b, "w": w, "trials": trials}, seed, results, passed
    )


def verify_fixed_point(p: float, n_samples: int, seed: int) -> dict:
    """Gates: two-sample KS between the limit law and its image under the
    fixed-point map below the 99% critical value; mean preserved within
    0.01; three iterations from a point mass contract W1 at no worse than
    the closed-form factor plus slack."""
    params = derive_params(p)
    n = n_samples
    source = lambda rng, size=None: analytic.sample_single_colour_limit(params, rng, size)

    ref = np.asarray(source(RngStream(seed, 0), n))
    image = analytic.apply_T(source, params, RngStream(seed, 1), size=n)
    ks = ks_two_sample(ref, image)
    ks_threshold = KS_COEFF_99 * math.sqrt(2.0 / n)
    mean_err = abs(float(np.mean(image)) - 1.0)

    w1_ref = np.asarray(source(RngStream(seed, 2), n))
    current = np.ones(n)
    distances = [empirical_wasserstein1(current, w1_ref)]
    for it in range(3):
        current = np.asarray(
            analytic.apply_T(analytic.resample_source(current), params, RngStream(seed, 3 + it), size=n)
        )
        distances.append(empirical_wasserstein1(current, w1_ref))
    factor = analytic.contraction_factor(params)
    ratios = [distances[i + 1] / distances[i] for i in range(3)]
    contraction_ok = all(r <= factor + W1_RATIO_SLACK for r in ratios)

    passed = ks < ks_threshold and mean_err <= MEAN_TOL and contraction_ok
    results = {
        "ks_two_sample": ks,
        "ks_threshold": ks_threshold,
        "mean_image": float(np.mean(image)),
        "mean_tolerance": MEAN_TOL,
        "w1_distances": [float(d) for d in distances],
        "w1_ratios": [float(r) for r in ratios],
        "contraction_factor": factor,
        "ratio_limit": factor + W1_RATIO_SLACK,
        "contraction_ok": contraction_ok,
    }
    return _report("verify fixed-point", {"p": p, "n_samples": n}, seed, results, passed)


def verify_exponent(
    p: float,
    trajectories: int,
    steps: int,
    seed: int,
    n_min: int = 10**4,
    workers: int = 1,
) -> dict:
    """Gates: pooled log-log slope within 0.05 of 1/beta and inside the
    [2p-1, (2p-1)/p] envelope widened by the fit standard error.  At p = 1
    the leader is the whole urn, so the slope must be 1 to rounding."""
    params = sim_params(p)
    trajs = run_trajectory_batch(params, steps, trajectories, seed, workers=workers)
    fit = growth_exponent(trajs, n_min)
    results: dict = {
        "slope": fit.slope,
        "stderr": fit.stderr,
        "n_points": fit.n_points,
        "window": list(fit.window),
    }
    if p == 1.0:
        passed = abs(fit.slope - 1.0) <= EXACT_SLOPE_TOL
        results["target"] = 1.0
        results["tolerance"] = EXACT_SLOPE_TOL
    else:
        target = 1.0 / params.beta  # type: ignore[operator]
        env_low = 2.0 * p - 1.0
        env_high = target
        in_band = target - SLOPE_HALF_WIDTH <= fit.slope <= target + SLOPE_HALF_WIDTH
        in_envelope = env_low - fit.stderr <= fit.slope <= env_high + fit.stderr
        passed = in_band and in_envelope
        results.update(
            {
                "target": target,
                "band": [target - SLOPE_HALF_WIDTH, target + SLOPE_HALF_WIDTH],
                "envelope": [env_low, env_high],
                "in_band": in_band,
                "in_envelope": in_envelope,
            }
        )
    return _report(
        "verify exponent",
        {"p": p, "trajectories": trajectories, "steps": steps, "n_min": n_min},
        seed,
        results,
        passed,
    )


def verify_dominance(
    p: float, trajectories: int, steps: int, seed: int, workers: int = 1
) -> dict:
    """Gate: at least 90% of runs see no leadership change in the final half
    of the horizon; per-run change counts are reported exactly."""
    params = sim_params(p)
    trajs = run_trajectory_batch(params, steps, trajectories, seed, workers=workers)
    rep = dominance_report(trajs)
    passed = rep.fraction_quiet_final_half >= 0.9
    results = {
        "fraction_quiet_final_half": rep.fraction_quiet_final_half,
        "threshold": 0.9,
        "median_last_change": rep.median_last_change,
        "max_last_change": int(rep.last_changes.max()),
        "change_counts": rep.change_counts.tolist(),
        "last_changes": rep.last_changes.tolist(),
    }
    return _report(
        "verify dominance",
        {"p": p, "trajectories": trajectories, "steps": steps},
        seed,
        results,
        passed,
    )
