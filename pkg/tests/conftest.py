import numpy as np
import pytest

from locspec.grids import PhaseGrid


@pytest.fixture(scope="session")
def grid1():
    return PhaseGrid(d=1, extent=6.0, points=256)


@pytest.fixture(scope="session")
def grid2():
    return PhaseGrid(d=2, extent=5.0, points=64)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240612)
