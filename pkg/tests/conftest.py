import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kgforge import electrostatic_spec, generate

settings.register_profile(
    "default",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def electro_table():
    return generate(electrostatic_spec(seed=1, t=2000))


@pytest.fixture()
def rng():
    return np.random.default_rng(20260822)
