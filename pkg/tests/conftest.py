import numpy as np
import pytest

from curlflux import fields as flds
from curlflux import geometry as geo


@pytest.fixture(scope="session")
def unit_disk_manifold():
    return geo.disk_manifold((0.0, 0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def unit_disk_collar(unit_disk_manifold):
    return geo.build_tangential_collar(unit_disk_manifold)


@pytest.fixture(scope="session")
def half_ball():
    return geo.half_ball_region(order=24, n_angular=64)


@pytest.fixture(scope="session")
def unit_cylinder():
    return geo.cylinder_region(order=20, n_angular=64)


@pytest.fixture(scope="session")
def cylinder_collar(unit_cylinder):
    return geo.build_transversal_collar(unit_cylinder)


@pytest.fixture(scope="session")
def rigid_rotation():
    return flds.catalog("rigid_rotation")


@pytest.fixture(scope="session")
def line_vortex():
    return flds.catalog("line_vortex")


@pytest.fixture(scope="session")
def newtonian():
    return flds.catalog("newtonian")


@pytest.fixture(scope="session")
def annuli():
    return flds.catalog("annuli")
