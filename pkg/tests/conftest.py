import numpy as np
import pytest

from levinfer.simulation import SimConfig, run_experiment

ACCEPTANCE_LINES = []

FULL_ALPHA_GRID = tuple(round(0.01 * k, 2) for k in range(1, 101))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def reference_report():
    """p=10, N=1000 experiment at r in {100, 300, 500}, full alpha grid, 100 replications."""
    cfg = SimConfig(p=10, N=1000, r_grid=(100, 300, 500), alpha_grid=FULL_ALPHA_GRID,
                    replications=100, noise_variance=9.0, B=100, master_seed=0)
    return run_experiment(cfg, workers=1)
