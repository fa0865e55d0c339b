import pytest

from helpers import ACCEPTANCE_LINES
from qltf.gfrf import DuffingParams
from qltf.spectral_core import MultitoneSignal


@pytest.fixture
def paper_params():
    return DuffingParams(wn=10.0, zeta=0.1, eps2=1e3, eps3=5e5)


@pytest.fixture
def two_tone():
    """0.25 cos(2.5 t) + 0.75 cos(7.5 t)."""
    return MultitoneSignal.from_arrays([0.25, 0.75], [2.5, 7.5])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
