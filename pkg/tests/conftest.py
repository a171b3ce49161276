import numpy as np
import pytest

from qtorus.siegel import SiegelPoint


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def T_i():
    return SiegelPoint([[1j]])


@pytest.fixture
def T_n2():
    return SiegelPoint([[1 + 1.2j, 0.3 + 0.1j], [0.3 + 0.1j, 0.5 + 0.9j]])


# acceptance criteria register one line each; printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
