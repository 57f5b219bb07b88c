import os
import sys

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")

from slicetheta.clifford import UnitVector  # noqa: E402
from slicetheta.lattice import Lattice  # noqa: E402
from slicetheta.theta import ThetaParams  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def Z1():
    return Lattice.integer(1)


@pytest.fixture(scope="session")
def Z2():
    return Lattice.integer(2)


@pytest.fixture(scope="session")
def Z4():
    return Lattice.integer(4)


@pytest.fixture(scope="session")
def D4():
    return Lattice.checkerboard(4)


@pytest.fixture(scope="session")
def p_Z1(Z1):
    return ThetaParams(Z1)


@pytest.fixture(scope="session")
def p_Z2(Z2):
    return ThetaParams(Z2)


@pytest.fixture(scope="session")
def p_Z4(Z4):
    return ThetaParams(Z4)


def random_omega(rng, n):
    v = rng.normal(size=n)
    return UnitVector.normalized(v)
