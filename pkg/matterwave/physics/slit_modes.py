"""Guided-mode expansion of the wavefunction inside a hard-walled slit.

Inside slit 1 the stationary solution is the separable sum

    psi = sum_{m,n} D_mn sin((2n+1) pi x / b) sin((2m+1) pi y / a)
                     exp(i kz_mn z) exp(-i E t / hbar)

with ``D_mn = 16 A / ((2m+1)(2n+1) pi^2)`` (even physical indices vanish)
and ``kz_mn = sqrt(k^2 - ((2n+1) pi / b)^2 - ((2m+1) pi / a)^2)`` taken on
the branch with non-negative imaginary part, so evanescent modes decay
along +z.  Slit 2 is the same expansion with ``y`` replaced by
``y - a - d``.  Indices ``m``/``n`` used throughout are the odd-only
indices; physical mode numbers are ``2m+1``/``2n+1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from ..errors import DomainError, InvalidParameterError
from .core import Kinematics, SlitGeometry, unit_phasor

Point = Tuple[float, float, float]

WALL_SLACK = 1e-12
"""Relative distance outside a wall still treated as on the wall (rounding of ``y - a - d``)."""


@dataclass(frozen=True)
class ModeIndex:
    """Odd-only mode index pair (physical modes ``2m+1``, ``2n+1``)."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 0 or self.n < 0:
            raise InvalidParameterError(f"mode indices must be non-negative integers, got {self!r}")


@dataclass(frozen=True)
class ModeTruncation:
    """Cut-offs for the double mode sum.

    Attributes:
        max_m: Largest odd-only index along the slit width (y).
        max_n: Largest odd-only index along the slit length (x).
        tail_tol: Relative screen-intensity change at which refinement stops.
        max_refinements: How many times the mode counts may be doubled; 0
            evaluates at ``max_m``/``max_n`` only.
    """

    max_m: int = 50
    max_n: int = 50
    tail_tol: float = 1e-6
    max_refinements: int = 3

    def __post_init__(self) -> None:
        for name in ("max_m", "max_n", "max_refinements"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise InvalidParameterError(f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not math.isfinite(self.tail_tol) or self.tail_tol <= 0.0:
            raise InvalidParameterError(f"tail_tol must be positive, got {self.tail_tol!r}")

    def doubled(self) -> "ModeTruncation":
        """Return the truncation with twice as many modes along each axis."""
        return replace(self, max_m=2 * self.max_m + 1, max_n=2 * self.max_n + 1)

    def fixed(self) -> "ModeTruncation":
        """Return this truncation with refinement disabled."""
        return replace(self, max_refinements=0)


@dataclass(frozen=True)
class LongitudinalWavevector:
    """Mode wavevector along z (rad/m); imaginary part >= 0."""

    value: complex


def fourier_coefficient(idx: ModeIndex, amplitude: float) -> float:
    """Overlap ``D_mn = 16 A / ((2m+1)(2n+1) pi^2)`` of the plane wave with mode ``idx``."""
    return 16.0 * amplitude / ((2 * idx.m + 1) * (2 * idx.n + 1) * math.pi ** 2)


def fourier_coefficient_raw(m: int, n: int, amplitude: float) -> float:
    """Overlap indexed by physical mode numbers ``m, n >= 1``; zero unless both are odd."""
    if m < 1 or n < 1:
        raise InvalidParameterError(f"physical mode numbers start at 1, got ({m}, {n})")
    if m % 2 == 0 or n % 2 == 0:
        return 0.0
    return 16.0 * amplitude / (m * n * math.pi ** 2)


def fourier_coefficients(m: np.ndarray, n: np.ndarray, amplitude: float) -> np.ndarray:
    """Vectorized ``D_mn`` over broadcastable odd-only index arrays."""
    return 16.0 * amplitude / ((2 * np.asarray(m) + 1) * (2 * np.asarray(n) + 1) * math.pi ** 2)


def transverse_wavenumber_sq(m: np.ndarray, n: np.ndarray, geo: SlitGeometry) -> np.ndarray:
    """``((2n+1) pi / b)^2 + ((2m+1) pi / a)^2`` for broadcastable index arrays."""
    ky = (2 * np.asarray(m) + 1) * math.pi / geo.width
    kx = (2 * np.asarray(n) + 1) * math.pi / geo.length
    return kx * kx + ky * ky


def longitudinal_wavevectors(
    m: np.ndarray, n: np.ndarray, kin: Kinematics, geo: SlitGeometry
) -> np.ndarray:
    """Vectorized longitudinal wavevectors, complex, principal branch (Im >= 0)."""
    radicand = kin.k * kin.k - transverse_wavenumber_sq(m, n, geo)
    return np.sqrt(np.asarray(radicand, dtype=complex))


def longitudinal_wavevector(
    idx: ModeIndex, kin: Kinematics, geo: SlitGeometry
) -> LongitudinalWavevector:
    """Wavevector along z of mode ``idx``; purely imaginary for evanescent modes."""
    value = longitudinal_wavevectors(np.array(idx.m), np.array(idx.n), kin, geo)
    return LongitudinalWavevector(value=complex(value))


def through_slit_lag(
    kz: np.ndarray, kappa_sq: np.ndarray, k: float, depth: float
) -> np.ndarray:
    """``exp(i (kz - k) depth)``, the mode phase relative to the free wave.

    ``kz - k`` is formed as ``-kappa^2 / (k + kz)`` so that nearly-free
    modes do not lose their small phase lag to cancellation.
    """
    return np.exp(1j * (-kappa_sq / (k + kz)) * depth)


def _local_coordinates(point: Point, slit: int, geo: SlitGeometry) -> Point:
    x, y, z = (float(v) for v in point)
    if slit == 2:
        y = y - geo.width - geo.gap
    elif slit != 1:
        raise InvalidParameterError(f"slit must be 1 or 2, got {slit!r}")
    local = []
    for value, extent in ((x, geo.length), (y, geo.width), (z, geo.thickness)):
        slack = WALL_SLACK * extent
        if not -slack <= value <= extent + slack:
            raise DomainError(f"point {point!r} lies outside slit {slit}")
        local.append(min(max(value, 0.0), extent))
    return local[0], local[1], local[2]


def _mode_sum(
    x: float, y: float, z: float, trunc: ModeTruncation, kin: Kinematics,
    geo: SlitGeometry, amplitude: float,
) -> complex:
    m = np.arange(trunc.max_m + 1)[:, None]
    n = np.arange(trunc.max_n + 1)[None, :]
    kappa_sq = transverse_wavenumber_sq(m, n, geo)
    kz = longitudinal_wavevectors(m, n, kin, geo)
    weights = fourier_coefficients(m, n, amplitude) * through_slit_lag(kz, kappa_sq, kin.k, z)
    sin_y = np.sin((2 * m[:, 0] + 1) * math.pi * (y / geo.width))
    sin_x = np.sin((2 * n[0, :] + 1) * math.pi * (x / geo.length))
    total = sin_y @ weights @ sin_x
    return complex(total * unit_phasor(kin.k * z))


def in_slit_wavefunction(
    point: Point,
    t: float,
    slit: int,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
) -> complex:
    """Truncated mode sum inside ``slit`` at ``point = (x, y, z)`` and time ``t``.

    Slit-2 points are given in the global frame and translated by
    ``y - a - d`` before evaluation, so the walls of both slits are nodes.

    Raises:
        DomainError: If the point is outside the slit (boundary included).
    """
    x, y, z = _local_coordinates(point, slit, geo)
    value = _mode_sum(x, y, z, trunc, kin, geo, amplitude)
    return value * unit_phasor(-kin.angular_frequency * float(t))


def exit_plane_wavefunction(
    x0: float,
    y0: float,
    slit: int,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
) -> complex:
    """Mode sum on the exit face ``z = c`` without the stationary time factor."""
    x, y, z = _local_coordinates((x0, y0, geo.thickness), slit, geo)
    return _mode_sum(x, y, z, trunc, kin, geo, amplitude)


def mode_count(trunc: ModeTruncation) -> int:
    """Number of ``(m, n)`` pairs kept by ``trunc``."""
    return (trunc.max_m + 1) * (trunc.max_n + 1)


__all__ = [
    "LongitudinalWavevector",
    "ModeIndex",
    "ModeTruncation",
    "exit_plane_wavefunction",
    "fourier_coefficient",
    "fourier_coefficient_raw",
    "fourier_coefficients",
    "in_slit_wavefunction",
    "longitudinal_wavevector",
    "longitudinal_wavevectors",
    "mode_count",
    "through_slit_lag",
    "transverse_wavenumber_sq",
]