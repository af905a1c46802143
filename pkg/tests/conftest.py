import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

SEED = int(os.environ.get("WARPSPEC_SEED", "20261016"))

settings.register_profile(
    "warpspec", deadline=None, max_examples=25, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("warpspec")


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
