import math

import numpy as np
import pytest

from matterwave.errors import DomainError, InvalidParameterError
from matterwave.physics.core import PhysicalParams, SlitGeometry, derive_kinematics
from matterwave.physics.slit_modes import (
    ModeIndex,
    ModeTruncation,
    exit_plane_wavefunction,
    fourier_coefficient,
    fourier_coefficient_raw,
    in_slit_wavefunction,
    longitudinal_wavevector,
    mode_count,
    transverse_wavenumber_sq,
)


def test_fourier_coefficients():
    assert fourier_coefficient(ModeIndex(0, 0), 1.0) == pytest.approx(16 / math.pi ** 2, rel=1e-15)
    assert fourier_coefficient(ModeIndex(1, 2), 2.0) == pytest.approx(32 / (15 * math.pi ** 2), rel=1e-15)
    assert fourier_coefficient_raw(3, 5, 2.0) == fourier_coefficient(ModeIndex(1, 2), 2.0)
    assert fourier_coefficient_raw(2, 1, 1.0) == 0.0
    assert fourier_coefficient_raw(1, 4, 1.0) == 0.0


def test_mode_index_must_be_non_negative():
    with pytest.raises(InvalidParameterError):
        ModeIndex(-1, 0)


def test_propagating_mode_is_nearly_free(kin, double_geometry):
    kz = longitudinal_wavevector(ModeIndex(0, 0), kin, double_geometry).value
    assert kz.imag == 0.0
    assert kz.real < kin.k
    assert kz.real == pytest.approx(kin.k, rel=1e-5)


def test_evanescent_mode_decays_along_z(double_geometry):
    slow = derive_kinematics(PhysicalParams(mass=1e-30, velocity=1.0, hbar=1.0))
    kz = longitudinal_wavevector(ModeIndex(3, 1), slow, double_geometry).value
    assert kz.real == 0.0
    assert kz.imag > 0.0


def test_truncation_doubling():
    trunc = ModeTruncation(max_m=50, max_n=20)
    finer = trunc.doubled()
    assert (finer.max_m, finer.max_n) == (101, 41)
    assert finer.tail_tol == trunc.tail_tol
    assert trunc.fixed().max_refinements == 0
    assert mode_count(trunc) == 51 * 21


@pytest.mark.parametrize("kwargs", [{"max_m": -1}, {"tail_tol": 0.0}, {"max_refinements": 1.5}])
def test_truncation_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        ModeTruncation(**kwargs)


@pytest.mark.parametrize("slit", [1, 2])
def test_wavefunction_vanishes_on_the_walls(kin, double_geometry, slit):
    geo = double_geometry
    trunc = ModeTruncation(max_m=50, max_n=50)
    low, high = geo.slit_range(slit)
    amplitude = 1.27e22
    points = [
        (0.5 * geo.length, low, 0.4e-6),
        (0.5 * geo.length, high, 0.4e-6),
        (0.0, low + 0.3 * geo.width, 0.9e-6),
        (geo.length, low + 0.3 * geo.width, 0.9e-6),
    ]
    for point in points:
        value = in_slit_wavefunction(point, 1e-3, slit, trunc, kin, geo, amplitude)
        assert abs(value) < 1e-12 * amplitude


def test_exit_plane_vanishes_on_the_walls(kin, double_geometry):
    geo = double_geometry
    trunc = ModeTruncation(max_m=30, max_n=30)
    assert abs(exit_plane_wavefunction(0.3 * geo.length, 0.0, 1, trunc, kin, geo, 1.0)) < 1e-12
    assert abs(exit_plane_wavefunction(0.3 * geo.length, geo.width, 1, trunc, kin, geo, 1.0)) < 1e-12


def test_entrance_partial_sum_approaches_incident_amplitude(kin, single_geometry):
    geo = single_geometry
    trunc = ModeTruncation(max_m=199, max_n=199)
    amplitude = 2.87e14
    centre = (0.5 * geo.length, 0.5 * geo.width, 0.0)
    value = in_slit_wavefunction(centre, 0.0, 1, trunc, kin, geo, amplitude)
    assert abs(value) == pytest.approx(amplitude, rel=0.02)
    assert abs(value.imag) < 1e-9 * amplitude


def test_slits_share_the_same_mode_profile(kin, double_geometry):
    geo = double_geometry
    trunc = ModeTruncation(max_m=20, max_n=20)
    x, y, z = 0.2 * geo.length, 0.37 * geo.width, 0.5e-6
    first = in_slit_wavefunction((x, y, z), 0.0, 1, trunc, kin, geo, 1.0)
    second = in_slit_wavefunction((x, y + geo.pitch, z), 0.0, 2, trunc, kin, geo, 1.0)
    assert second == pytest.approx(first, rel=1e-9)


def test_time_factor_is_a_pure_phase(kin, double_geometry):
    geo = double_geometry
    trunc = ModeTruncation(max_m=10, max_n=10)
    point = (0.5 * geo.length, 0.5 * geo.width, 0.2e-6)
    still = in_slit_wavefunction(point, 0.0, 1, trunc, kin, geo, 1.0)
    later = in_slit_wavefunction(point, 1e-15, 1, trunc, kin, geo, 1.0)
    assert abs(later) == pytest.approx(abs(still), rel=1e-12)


def test_points_outside_the_slit_are_rejected(kin, double_geometry):
    geo = double_geometry
    trunc = ModeTruncation(max_m=5, max_n=5)
    gap_point = (0.5 * geo.length, geo.width + 0.5 * geo.gap, 0.1e-6)
    with pytest.raises(DomainError):
        in_slit_wavefunction(gap_point, 0.0, 1, trunc, kin, geo, 1.0)
    with pytest.raises(DomainError):
        in_slit_wavefunction(gap_point, 0.0, 2, trunc, kin, geo, 1.0)
    with pytest.raises(DomainError):
        in_slit_wavefunction((0.5 * geo.length, 0.5 * geo.width, 2e-6), 0.0, 1, trunc, kin, geo, 1.0)
    with pytest.raises(InvalidParameterError):
        in_slit_wavefunction((0.0, 0.0, 0.0), 0.0, 3, trunc, kin, geo, 1.0)


def test_dispersion_relation_over_random_modes(kin, double_geometry):
    rng = np.random.default_rng(11)
    for m, n in rng.integers(0, 100_000, size=(1000, 2)):
        kz = longitudinal_wavevector(ModeIndex(int(m), int(n)), kin, double_geometry).value
        kappa_sq = float(transverse_wavenumber_sq(m, n, double_geometry))
        assert abs(kz * kz + kappa_sq - kin.k ** 2) <= 1e-12 * kin.k ** 2


def test_wavefunction_vanishes_at_random_boundary_points(kin, double_geometry):
    geo = double_geometry
    trunc = ModeTruncation(max_m=20, max_n=20)
    amplitude = 1.27e22
    rng = np.random.default_rng(5)
    for _ in range(1000):
        slit = int(rng.integers(1, 3))
        low, high = geo.slit_range(slit)
        x = rng.uniform(0.0, geo.length)
        y = rng.uniform(low, high)
        face = rng.integers(0, 4)
        if face == 0:
            y = low
        elif face == 1:
            y = high
        elif face == 2:
            x = 0.0
        else:
            x = geo.length
        z = rng.uniform(0.0, geo.thickness)
        value = in_slit_wavefunction((x, y, z), 0.0, slit, trunc, kin, geo, amplitude)
        assert abs(value) < 1e-12 * amplitude


def test_exit_plane_is_the_in_slit_sum_at_the_exit_face(kin, double_geometry):
    geo = double_geometry
    trunc = ModeTruncation(max_m=15, max_n=15)
    x0, y0 = 0.31 * geo.length, 0.62 * geo.width
    exit_value = exit_plane_wavefunction(x0, y0, 1, trunc, kin, geo, 3.0)
    assert exit_value == in_slit_wavefunction((x0, y0, geo.thickness), 0.0, 1, trunc, kin, geo, 3.0)


def test_exit_plane_tends_to_the_entrance_as_the_slit_thins(kin, double_geometry):
    trunc = ModeTruncation(max_m=15, max_n=15)
    x0, y0 = 0.31 * double_geometry.length, 0.62 * double_geometry.width
    entrance = in_slit_wavefunction((x0, y0, 0.0), 0.0, 1, trunc, kin, double_geometry, 1.0)
    geo = double_geometry
    thin = SlitGeometry(width=geo.width, length=geo.length, thickness=1e-20, gap=geo.gap)
    assert exit_plane_wavefunction(x0, y0, 1, trunc, kin, thin, 1.0) == pytest.approx(entrance, rel=1e-7)


def test_doubling_the_modes_settles_the_interior_sum(kin, single_geometry):
    geo = single_geometry
    rng = np.random.default_rng(23)
    points = np.column_stack([
        rng.uniform(0.2, 0.8, 100) * geo.length,
        rng.uniform(0.2, 0.8, 100) * geo.width,
        rng.uniform(0.0, 1.0, 100) * geo.thickness,
    ])
    trunc = ModeTruncation(max_m=10, max_n=10, tail_tol=0.02)
    levels = [trunc]
    for _ in range(4):
        levels.append(levels[-1].doubled())
    values = [
        np.array([in_slit_wavefunction(tuple(p), 0.0, 1, level, kin, geo, 1.0) for p in points])
        for level in levels
    ]
    changes = [
        float(np.mean(np.abs(finer - coarser) / np.abs(finer)))
        for coarser, finer in zip(values, values[1:])
    ]
    assert all(later < earlier for earlier, later in zip(changes, changes[1:]))
    assert changes[-1] < trunc.tail_tol
