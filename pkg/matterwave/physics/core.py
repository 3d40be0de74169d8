"""Physical constants, particle and geometry parameters, kinematics.

Everything here is SI.  The reduced Planck constant defaults to the
rounded value ``1.055e-34`` J*s used by the published C60 parameter set,
so that derived wavenumbers match those parameters exactly.

Example::

    params = PhysicalParams(mass=1.4e-24, velocity=220.0)
    kin = derive_kinematics(params)
    kin.wavelength  # ~2.152e-12 m
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ..errors import InvalidParameterError

HBAR = 1.055e-34
"""Reduced Planck constant (J*s) as quoted with the C60 parameters."""

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalParams:
    """Particle parameters and the incident-wave amplitude.

    Attributes:
        mass: Particle mass in kg.
        velocity: Particle velocity in m/s.
        hbar: Reduced Planck constant in J*s.
        amplitude: Incident plane-wave amplitude ``A``; a pure scale factor.
    """

    mass: float
    velocity: float
    hbar: float = HBAR
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mass", "velocity", "hbar", "amplitude"):
            object.__setattr__(self, name, _require_positive(name, getattr(self, name)))


@dataclass(frozen=True)
class Kinematics:
    """Wavenumber (rad/m), de Broglie wavelength (m), energy (J).

    ``angular_frequency`` is ``E / hbar`` (rad/s), the rate of the stationary
    time factor ``exp(-i E t / hbar)``.
    """

    k: float
    wavelength: float
    energy: float
    angular_frequency: float


@dataclass(frozen=True)
class SlitGeometry:
    """Slit dimensions in metres.

    Slit 1 occupies ``y in [0, width]`` and slit 2 ``y in [width + gap,
    2 * width + gap]``; ``x`` runs along the slit length and ``z`` through
    the thickness.  ``gap`` is ignored by single-slit runs.
    """

    width: float
    length: float
    thickness: float
    gap: float

    def __post_init__(self) -> None:
        for name in ("width", "length", "thickness", "gap"):
            object.__setattr__(self, name, _require_positive(name, getattr(self, name)))

    @property
    def pitch(self) -> float:
        """Centre-to-centre distance of the two slits, ``a + d``."""
        return self.width + self.gap

    def slit_range(self, slit: int) -> tuple:
        """Return the ``(y_low, y_high)`` extent of ``slit`` (1 or 2)."""
        if slit == 1:
            return 0.0, self.width
        if slit == 2:
            return self.width + self.gap, 2.0 * self.width + self.gap
        raise InvalidParameterError(f"slit must be 1 or 2, got {slit!r}")

    def axis(self, double: bool) -> float:
        """``y`` of the symmetry axis of the single or double aperture."""
        return self.width + 0.5 * self.gap if double else 0.5 * self.width


@dataclass(frozen=True, eq=False)
class ScreenGeometry:
    """Screen distance, sampled screen coordinates and fixed angle ``alpha``.

    ``positions`` are measured on the screen from the symmetry axis of the
    aperture system.
    """

    distance: float
    positions: np.ndarray = field(repr=False)
    alpha: float = 0.0

    def __post_init__(self) -> None:
        _require_positive("distance", self.distance)
        positions = np.asarray(self.positions, dtype=float)
        if positions.ndim != 1 or positions.size == 0:
            raise InvalidParameterError("positions must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(positions)):
            raise InvalidParameterError("positions must be finite")
        if np.any(np.diff(positions) <= 0.0):
            raise InvalidParameterError("positions must be strictly increasing")
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or abs(alpha) >= 0.5 * math.pi:
            raise InvalidParameterError(f"alpha must lie in (-pi/2, pi/2), got {alpha!r}")
        positions.setflags(write=False)
        object.__setattr__(self, "distance", float(self.distance))
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def uniform(
        cls, distance: float, s_min: float, s_max: float, n_points: int, alpha: float = 0.0
    ) -> "ScreenGeometry":
        """Build a uniform scan of ``n_points`` samples over ``[s_min, s_max]``.

        Scans symmetric about the axis are made exactly antisymmetric so that
        mirror-image samples see bit-identical ``|s|``.
        """
        if int(n_points) < 2:
            raise InvalidParameterError(f"n_points must be at least 2, got {n_points!r}")
        if not s_min < s_max:
            raise InvalidParameterError(f"s_min must be below s_max, got {s_min!r} >= {s_max!r}")
        positions = np.linspace(float(s_min), float(s_max), int(n_points))
        if s_min == -s_max:
            positions = 0.5 * (positions - positions[::-1])
        return cls(distance=distance, positions=positions, alpha=alpha)

    def __len__(self) -> int:
        return int(self.positions.size)


def derive_kinematics(params: PhysicalParams) -> Kinematics:
    """Derive ``k = M v / hbar``, ``lambda = 2 pi / k`` and ``E = hbar^2 k^2 / 2M``.

    Raises:
        InvalidParameterError: If mass, velocity or hbar is not positive.
    """
    mass = _require_positive("mass", params.mass)
    velocity = _require_positive("velocity", params.velocity)
    hbar = _require_positive("hbar", params.hbar)
    k = mass * velocity / hbar
    energy = (hbar * k) ** 2 / (2.0 * mass)
    return Kinematics(
        k=k,
        wavelength=2.0 * math.pi / k,
        energy=energy,
        angular_frequency=energy / hbar,
    )


def unit_phasor(phase: ArrayLike) -> Union[complex, np.ndarray]:
    """Return ``exp(i * phase)`` with the phase reduced modulo ``2 pi`` first."""
    reduced = np.fmod(np.asarray(phase, dtype=float), 2.0 * math.pi)
    result = np.exp(1j * reduced)
    if result.ndim == 0:
        return complex(result)
    return result


def sin_beta(s: ArrayLike, distance: float) -> Union[float, np.ndarray]:
    """Map screen position ``s`` to ``sin(beta) = s / sqrt(l^2 + s^2)``.

    Accepts scalars or arrays.  The result is odd in ``s`` and strictly
    increasing.

    Raises:
        InvalidParameterError: If ``distance`` is not positive.
    """
    distance = _require_positive("distance", distance)
    s_arr = np.asarray(s, dtype=float)
    result = s_arr / np.hypot(distance, s_arr)
    if result.ndim == 0:
        return float(result)
    return result
