import pytest

from urnsim import derive_params, sim_params
from urnsim.urn_discrete import run_trajectory_batch

# fixed seeds so every run of the suite sees the same draws
SEED = 20240601
GROWTH_SEED = 777
GROWTH_STEPS = 10**6
GROWTH_TRIALS = 50


@pytest.fixture(scope="session")
def params075():
    return derive_params(0.75)


@pytest.fixture(scope="session")
def params06():
    return derive_params(0.6)


@pytest.fixture(scope="session")
def params1():
    return sim_params(1.0)


@pytest.fixture(scope="session")
def growth_batch(params075):
    """50 urn trajectories of 1e6 steps at p = 0.75, shared by the growth-rate
    tests and the acceptance suite (criterion 7 scale)."""
    return run_trajectory_batch(params075, GROWTH_STEPS, GROWTH_TRIALS, GROWTH_SEED, workers=4)
