import numpy as np
import pytest

from exactsharpe import AssetMoments

EX1_MU = [0.1, 0.2]
EX1_OMEGA = [[0.04, 0.01], [0.01, 0.09]]


@pytest.fixture
def ex1():
    """Two-asset worked example: optimum at (0.5, 0.5)."""
    return AssetMoments.from_arrays(EX1_MU, EX1_OMEGA)


def random_spd(rng, n, eps=1e-3):
    A = rng.standard_normal((n, n))
    omega = A.T @ A + n * eps * np.eye(n)
    return np.triu(omega) + np.triu(omega, 1).T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
