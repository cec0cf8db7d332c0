import numpy as np
import pytest

from gammabis.models import DiscreteBIS, TestChannel

ACCEPTANCE_LINES = []


def random_stochastic(rng, rows, cols):
    return rng.dirichlet(np.ones(cols), size=rows)


def random_model(rng, max_size=4):
    nx, ny, nz = rng.integers(2, max_size + 1, size=3)
    return DiscreteBIS(
        rng.dirichlet(np.ones(nx)),
        random_stochastic(rng, nx, ny),
        random_stochastic(rng, nx, nz),
    )


def random_test_channel(rng, y_size, u_size=None):
    if u_size is None:
        u_size = int(rng.integers(1, y_size + 3))
    return TestChannel(random_stochastic(rng, y_size, u_size))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
