import numpy as np
import pytest

from epalpha.grid import TorusGrid, VelocityField
from epalpha.initial_data import bandlimited


@pytest.fixture
def g1():
    return TorusGrid(1, 64)


@pytest.fixture
def g2():
    return TorusGrid(2, 32)


@pytest.fixture
def g2_64():
    return TorusGrid(2, 64)


def random_field(grid, seed, k_max=None):
    """Seeded band-limited random field, unit H^2 norm."""
    k_max = k_max if k_max is not None else grid.n / 4.0 * (2 * np.pi / grid.length)
    return bandlimited(grid, seed, k_max, 2.0, 1.0)


@pytest.fixture
def rand1(g1):
    return random_field(g1, 0)


@pytest.fixture
def rand2(g2):
    return random_field(g2, 0)
