from pathlib import Path

import pytest

from nuca_lab.core.dynamics import build_example1
from nuca_lab.core.odometer import build_three_state_odometer, extend_to_Z
from nuca_lab.core.spiral import build_spiral_odometer

GOLDEN_DIR = Path(__file__).parent / 'golden'

# Hand-stepped odometer from all-0: rows are t = 0..18, columns cells 0..9
ODOMETER_ROWS = [
    '0000000000', '1000000000', '2100000000', '0110000000', '1101000000',
    '2011100000', '0210010000', '1211011000', '2210110100', '0011101110',
    '1010011001', '2111010101', '0100111111', '1110100000', '2001110000',
    '0201001000', '1221101100', '2201011010', '0021110111',
]


@pytest.fixture
def odometer():
    return build_three_state_odometer()[1]


@pytest.fixture
def odometer_z():
    return extend_to_Z()


@pytest.fixture
def example1():
    return build_example1()


@pytest.fixture
def spiral_theta():
    return build_spiral_odometer()


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR
