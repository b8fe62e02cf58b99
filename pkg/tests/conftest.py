import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nonrecip.params import TWO_PI_MHZ, SystemParams  # noqa: E402


@pytest.fixture
def ref_params():
    """Reference cavity/NV rates, v = 250 m/s, g = kappa, Omega_c = 2pi x 500 MHz."""
    return SystemParams()


@pytest.fixture
def kappa(ref_params):
    return ref_params.kappa


@pytest.fixture
def mhz():
    return TWO_PI_MHZ


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
