import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mplxlink.edgelist import figure1_network  # noqa: E402

FIG1_NODES = ("X", "U", "Y", "V", "Z", "W", "P", "Q", "R")


@pytest.fixture(scope="session")
def fig1():
    return figure1_network()


@pytest.fixture
def node():
    return {name: i for i, name in enumerate(FIG1_NODES)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
