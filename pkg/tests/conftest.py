import os

import numpy as np
import pytest

from scripts.hitchin import HitchinPair, pair_from_json
from scripts.shared_utils import PAIRS_DIR, load_json_file


def load_sample(name):
    return pair_from_json(load_json_file(os.path.join(PAIRS_DIR, f"{name}.json")))


@pytest.fixture
def r1n1():
    """theta = 2 + 3z on O, sigma0 = 1 + z^3."""
    return load_sample("r1_n1_line")


@pytest.fixture
def r2n1():
    """theta = [[0, 1], [z, 0]], spectral curve y^2 = z, sigma0 = 1."""
    return load_sample("r2_n1_smooth")


@pytest.fixture
def r2n2():
    """Genus-1 spectral curve y^2 = (z^2 - 1)(z^2 - 4), sigma0 = 1 + z^4."""
    return load_sample("r2_n2_genus1")


@pytest.fixture
def r3n1():
    return load_sample("r3_n1_genus1")


@pytest.fixture
def r3n2():
    return load_sample("r3_n2_genus4")


@pytest.fixture
def zero_pair():
    return HitchinPair.build((0, 0), 1, [[[0, 0], [0, 0]], [[0, 0], [0, 0]]])


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(7))
