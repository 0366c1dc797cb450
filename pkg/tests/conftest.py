import numpy as np
import pytest

from spatialmem import EngineConfig


@pytest.fixture
def small_cfg():
    """Small-dimension config that keeps unit tests fast."""
    return EngineConfig(d=16, Lambda=8, L=256.0, decoder_hidden=8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
