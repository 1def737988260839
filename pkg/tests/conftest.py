import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from resona1d.model import MaterialConstants, Modulation, ResonatorChain

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

PHASES3 = [0.0, np.pi / 2, np.pi]


@pytest.fixture
def material():
    return MaterialConstants.from_speeds(1e-4)


@pytest.fixture
def single():
    return ResonatorChain([1.0], [1.0])


@pytest.fixture
def trio():
    return ResonatorChain([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])


@pytest.fixture
def trio_uneven():
    return ResonatorChain([1.0, 1.0, 1.0], [1.0, 1.0, 2.0])


@pytest.fixture
def kappa_mod():
    return Modulation.uniform(3, 0.03, 0.0, 0.2, PHASES3, PHASES3)
