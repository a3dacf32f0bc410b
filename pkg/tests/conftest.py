import numpy as np
import pytest

from leolab.constellation import ConstellationConfig


@pytest.fixture(scope="session")
def cfg():
    """Default 24x66 shell."""
    return ConstellationConfig()


@pytest.fixture(scope="session")
def small_cfg():
    """8x12 shell, cheap enough for exhaustive checks."""
    return ConstellationConfig(num_planes=8, sats_per_plane=12)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
