"""urnsim: simulation and analytics for a recolouring urn and its limits."""

from .core import (
    Bernoulli,
    Exponential,
    GammaInt,
    Params,
    RngStream,
    Uniform,
    binom_pmf,
    derive_params,
    reg_inc_beta,
    sample,
    sim_params,
)

__version__ = "0.1.0"

__all__ = [
    "Bernoulli",
    "Exponential",
    "GammaInt",
    "Params",
    "RngStream",
    "Uniform",
    "binom_pmf",
    "derive_params",
    "reg_inc_beta",
    "sample",
    "sim_params",
    "__version__",
]
