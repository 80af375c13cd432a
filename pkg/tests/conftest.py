import copy
import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

BENCHMARK_ENV = os.path.join(ROOT, "config", "benchmark_env.json")
BENCHMARK_START = (5.0, 2.0)
BENCHMARK_GOAL = (57.0, 28.0)

EMPTY_DOC = {
    "bounds": {"xmin": 0.0, "xmax": 10.0, "ymin": 0.0, "ymax": 4.0},
    "psi_levels": [0.0, 1.0],
    "phi_range": [0.0, 10.0],
    "grid": {"m_phi": 11, "m_rows": [5]},
    "obstacles": [],
}

# one obstacle centered on the interface y = 4
TWO_CHANNEL_DOC = {
    "bounds": {"xmin": 0.0, "xmax": 20.0, "ymin": 0.0, "ymax": 8.0},
    "psi_levels": [0.0, 1.0, 2.0],
    "phi_range": [0.0, 20.0],
    "grid": {"m_phi": 21, "m_rows": [5, 5]},
    "obstacles": [
        {"group": 1, "polygon": [[8.0, 3.0], [12.0, 3.0], [12.0, 5.0], [8.0, 5.0]]},
    ],
}


@pytest.fixture
def empty_doc():
    return copy.deepcopy(EMPTY_DOC)


@pytest.fixture
def two_channel_doc():
    return copy.deepcopy(TWO_CHANNEL_DOC)


@pytest.fixture
def benchmark_env():
    return BENCHMARK_ENV
