import numpy as np
import pytest

from sfrf.bearing import FaultMode, OperatingMode
from sfrf.synthetic import degradation_run

# Same 0.78125 Hz resolution as the XJTU-SY snapshots at a quarter of the size.
SMALL_MODE = OperatingMode(shaft_frequency=35.0, sampling_frequency=6400.0)
SMALL_N = 8192


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def small_run():
    return degradation_run(8, 12, FaultMode.OUTER_RACE, peak=1.0, noise_std=0.1, seed=5, mode=SMALL_MODE, n_samples=SMALL_N)


# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
