import numpy as np
import pytest

from sturmratio import Potential

ACCEPTANCE_LINES = []


def random_barrier(seed, nodes=9):
    """Nonpositive, piecewise-linear single-barrier potential with random nodes."""
    rng = np.random.default_rng(seed)
    xs = np.concatenate(([0.0], np.sort(rng.uniform(0.02, 0.98, nodes - 2)), [1.0]))
    k = int(rng.integers(1, nodes - 1))
    qs = np.empty(nodes)
    qs[k] = -rng.uniform(0.0, 2.0)
    for i in range(k - 1, -1, -1):
        qs[i] = qs[i + 1] - rng.uniform(0.0, 3.0)
    for i in range(k + 1, nodes):
        qs[i] = qs[i - 1] - rng.uniform(0.0, 3.0)
    return Potential.sampled(xs, qs)


@pytest.fixture
def zero():
    return Potential.constant(0.0)


@pytest.fixture
def barrier():
    return Potential.barrier_sin(-5.0, 4.0)


@pytest.fixture
def well():
    # 5 - 4 sin(pi x): nonnegative single-well
    return Potential.barrier_sin(5.0, -4.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
