import numpy as np
import pytest

from mhddecay.grid import TorusGrid
from mhddecay.model import MaterialParams


@pytest.fixture
def grid2d():
    return TorusGrid(2, 32, 2 * np.pi)


@pytest.fixture
def grid2d_wide():
    # wider box: octaves 0..1 resolvable, lattice spacing 1/2
    return TorusGrid(2, 64, 4 * np.pi)


@pytest.fixture
def grid3d():
    return TorusGrid(3, 16, 2 * np.pi)


@pytest.fixture
def params2d():
    return MaterialParams(dim=2, mu_star=0.25, direction=(1.0, 0.0))


@pytest.fixture
def params3d():
    return MaterialParams(dim=3, mu_star=0.25, direction=(0.0, 0.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
