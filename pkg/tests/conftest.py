import math

import pytest
from hypothesis import HealthCheck, settings

from tbtsp.model import DiscretizationScheme, KinematicLimits, make_grid_instance

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def paper_limits():
    """1.5 m/s, 0.5 m/s^2: the benchmark's reference vehicle."""
    return KinematicLimits(1.5, 0.5)


@pytest.fixture
def unit_limits():
    """v_max = a_max = sqrt(2) so each axis sees unit bounds."""
    return KinematicLimits(math.sqrt(2.0), math.sqrt(2.0))


@pytest.fixture
def small_instance(paper_limits):
    scheme = DiscretizationScheme.from_counts(4, (0.5, 1.0), paper_limits)
    return make_grid_instance(2, 2, 9.0, paper_limits, scheme)
