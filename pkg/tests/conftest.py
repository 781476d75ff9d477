import math

import pytest
from hypothesis import settings

from curvscatter.geometry import GaussianDent

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SIGMA = 1.0 / math.sqrt(2.0)


@pytest.fixture(scope="session")
def dent():
    return GaussianDent(1.0, SIGMA)


@pytest.fixture(scope="session")
def flat():
    return GaussianDent(0.0, SIGMA)
