import numpy as np
import pytest

from clusterreg.core import PointSet


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_cloud(rng):
    return PointSet(rng.normal(size=(100, 3)))
