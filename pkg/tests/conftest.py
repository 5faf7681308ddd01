import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# numeric property tests routinely exceed hypothesis' default deadline on
# shared CI boxes; determinism matters more than wall-clock policing here
settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng() -> np.random.Generator:
    """Test-local randomness, fixed seed per test function."""
    return np.random.default_rng(0xC0FFEE)
