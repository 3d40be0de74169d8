"""Shared fixtures: the C60 particle and the slit geometries used across tests."""
import math

import pytest

from matterwave.physics.core import PhysicalParams, SlitGeometry, derive_kinematics
from matterwave.physics.slit_modes import ModeTruncation


@pytest.fixture
def c60():
    return PhysicalParams(mass=1.4e-24, velocity=220.0, hbar=1.055e-34, amplitude=1.0)


@pytest.fixture
def kin(c60):
    return derive_kinematics(c60)


@pytest.fixture
def single_geometry():
    return SlitGeometry(width=10e-6, length=0.01, thickness=1.3e-6, gap=10e-6)


@pytest.fixture
def double_geometry():
    return SlitGeometry(width=0.05e-6, length=0.01, thickness=1.3e-6, gap=0.05e-6)


@pytest.fixture
def wide_gap_geometry():
    """Narrow slits far apart: many fringes under a nearly flat envelope."""
    return SlitGeometry(width=0.05e-6, length=0.01, thickness=1.3e-6, gap=1.0e-6)


@pytest.fixture
def fixed_modes():
    return ModeTruncation(max_m=50, max_n=50, max_refinements=0)


@pytest.fixture
def balanced():
    from matterwave.physics.intensity import SuperpositionSpec

    return SuperpositionSpec(c1=math.sqrt(0.5), c2=math.sqrt(0.5))
