import numpy as np
import pytest

from qhsw.channel import DiagonalUnitalChannel, QubitAffineChannel

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def qubit_channel():
    return DiagonalUnitalChannel.qubit(0.5, 0.5, 0.9)


@pytest.fixture
def nonunital_channel():
    return QubitAffineChannel([0, 0, 0.2], [0, 0, 0.4])


@pytest.fixture
def qutrit_mixture_channel():
    q = np.zeros((3, 3))
    q[0, 0], q[0, 1], q[1, 0] = 0.7, 0.2, 0.1
    return DiagonalUnitalChannel.from_weyl_mixture(q)
