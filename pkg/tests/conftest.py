import math

import numpy as np
import pytest

from carpetlab.boxmodel import BoxConfig
from carpetlab.wavepacket import GaussianPacket, expand


@pytest.fixture(scope="session")
def box():
    return BoxConfig()


@pytest.fixture(scope="session")
def packet_still(box):
    """xbar = L/4, dx = L/20, kbar = 0."""
    return GaussianPacket.from_box_units(box, 0.25, 0.05, 0.0)


@pytest.fixture(scope="session")
def packet_moving(box):
    """xbar = L/4, dx = L/20, kbar = 20 pi / L."""
    return GaussianPacket.from_box_units(box, 0.25, 0.05, 20.0 * math.pi)


@pytest.fixture(scope="session")
def state_still(packet_still, box):
    return expand(packet_still, box)


@pytest.fixture(scope="session")
def state_moving(packet_moving, box):
    return expand(packet_moving, box)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
