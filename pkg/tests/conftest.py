import numpy as np
import pytest

from qpolar.grid import ModeGrid

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def zgrid():
    return ModeGrid([Z], [1.0])


@pytest.fixture
def xyz_grid():
    """Three unit modes along z, x and y with unit weights."""
    return ModeGrid([Z, X, Y], [1.0, 1.0, 1.0])


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Collects one summary line per acceptance criterion."""

    def log(criterion, passed, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
