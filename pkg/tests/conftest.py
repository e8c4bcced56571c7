import numpy as np
import pytest

from ljspec import LJParams, assemble_hamiltonian, barrier_truncation_point, build_grid

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lj11():
    return LJParams(1.0, 1.0)


@pytest.fixture(scope="session")
def lj110():
    return LJParams(1.0, 10.0)


@pytest.fixture(scope="session")
def op110(lj110):
    eps = barrier_truncation_point(lj110)
    return assemble_hamiltonian(build_grid(eps, 50.0, 20000), lj110)


@pytest.fixture(scope="session")
def op11(lj11):
    eps = barrier_truncation_point(lj11)
    return assemble_hamiltonian(build_grid(eps, 50.0, 20000), lj11)


def free_box(n_interior, length=1.0):
    """Free operator with Dirichlet walls at 0 and ``length`` and n interior nodes."""
    return assemble_hamiltonian(build_grid(0.0, length, n_interior + 2), None)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
