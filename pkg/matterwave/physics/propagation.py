"""Propagation of the exit-plane wavefunction to the detection screen.

The exit-plane mode sum is carried to the screen with the free-particle
propagator in the far-field linearisation ``R^2 ~ r^2 - 2 r (x0 sin(alpha)
+ y0 sin(beta))``.  Each mode then contributes a product of two aperture
integrals of the form ``int_0^L exp(-i q u) sin(j pi u / L) du`` which are
evaluated in closed form; an adaptive quadrature of the same integrals is
kept as an independent oracle.

Phases of order ``k r ~ 1e12`` rad cannot be evaluated per mode in double
precision.  Amplitudes are therefore computed in reduced form: the common
factors ``exp(i k r / 2)`` (or ``exp(i k R)``), ``exp(i k c)`` and the
aperture-centre phases are split off, and both slits share them, so their
relative phase is exact.  ``slit_screen_wavefunction`` reattaches the
common factors for callers that want the full value.

The mode sums fall off only like ``1/N``, so the modes past the truncation
are added as closed-form tails rather than dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc, polygamma

from ..errors import ConvergenceError, DomainError, InvalidParameterError
from ..utils.logger import get_logger
from .core import HBAR, ArrayLike, Kinematics, ScreenGeometry, SlitGeometry, sin_beta, unit_phasor
from .slit_modes import (
    ModeTruncation,
    fourier_coefficients,
    longitudinal_wavevectors,
    through_slit_lag,
    transverse_wavenumber_sq,
)

logger = get_logger(__name__)

FRESNEL_PHASE = complex(-math.sqrt(2.0) / 2.0, -math.sqrt(2.0) / 2.0)
"""``(1/i)^(3/2)`` on the principal branch."""

CHUNK_SIZE = 1024

TAIL_TERMS = 1 << 18
"""Odd modes of one axis summed term by term past the truncation."""

TAIL_SPAN = 16
TAIL_RESONANCE = 4
EVANESCENT_MARGIN = 1.01


class KernelChoice(str, Enum):
    """Prefactor family applied to both slits."""

    FRESNEL = "fresnel"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class ScreenPoint:
    """A detection point on the screen.

    Attributes:
        s: Screen coordinate along y, measured from the aperture axis (m).
        alpha: Fixed angle to the yz-plane (rad).
        r: Distance from the aperture origin to the point (m).
        sin_beta: ``s / sqrt(l^2 + s^2)``.
    """

    s: float
    alpha: float
    r: float
    sin_beta: float

    @classmethod
    def at(cls, s: float, distance: float, alpha: float = 0.0) -> "ScreenPoint":
        """Build the point at screen coordinate ``s`` on a screen at ``distance``."""
        s = float(s)
        return cls(
            s=s,
            alpha=float(alpha),
            r=math.hypot(distance, s) / math.cos(alpha),
            sin_beta=sin_beta(s, distance),
        )


@dataclass(frozen=True)
class ApertureIntegral:
    """``value = int_0^extent exp(-i q u) sin(mode pi u / extent) du``."""

    q: float
    mode: int
    extent: float
    value: complex

    @classmethod
    def evaluate(cls, q: float, mode: int, extent: float) -> "ApertureIntegral":
        return cls(q=float(q), mode=int(mode), extent=float(extent),
                   value=complex(aperture_integral_closed(q, mode, extent)))


@dataclass(frozen=True)
class OracleReport:
    """Outcome of the closed-form versus quadrature comparison."""

    cases: int
    max_relative_error: float
    worst_q: float
    worst_mode: int
    worst_extent: float


def free_propagator(R: float, dt: float, mass: float, hbar: float = HBAR) -> complex:
    """Free-particle kernel ``(M / (2 pi i hbar dt))^(3/2) exp(i M R^2 / (2 hbar dt))``.

    Raises:
        InvalidParameterError: If ``dt``, ``mass`` or ``hbar`` is not positive.
    """
    if not dt > 0.0:
        raise InvalidParameterError(f"dt must be positive, got {dt!r}")
    if not mass > 0.0 or not hbar > 0.0:
        raise InvalidParameterError("mass and hbar must be positive")
    modulus = (mass / (2.0 * math.pi * hbar * dt)) ** 1.5
    return modulus * FRESNEL_PHASE * unit_phasor(mass * R * R / (2.0 * hbar * dt))


def _check_modes(mode: np.ndarray) -> np.ndarray:
    mode = np.asarray(mode)
    if np.any(mode < 1) or np.any(mode % 2 == 0) or np.any(mode != np.round(mode)):
        raise InvalidParameterError("aperture modes must be positive odd integers")
    return mode.astype(int)


def aperture_profile(omega: np.ndarray, mode: np.ndarray) -> np.ndarray:
    """Real, even part of ``int_0^1 exp(-i omega t) sin(mode pi t) dt``.

    The full integral is ``exp(-i omega / 2) * aperture_profile``.  With
    ``theta = mode pi`` and ``delta = (theta - |omega|) / 2`` the profile is
    ``s * theta * sinc(delta) / (theta + |omega|)`` where ``s = +-1`` is
    ``sin(theta / 2)``; this form stays exact through the resonance
    ``|omega| = theta``.
    """
    mode = np.asarray(mode)
    theta = mode * math.pi
    width = np.abs(np.asarray(omega, dtype=float))
    sign = np.where(((mode - 1) // 2) % 2 == 0, 1.0, -1.0)
    delta = 0.5 * (theta - width)
    return sign * theta * np.sinc(delta / math.pi) / (theta + width)


def aperture_integral_closed(
    q: Union[float, np.ndarray], mode: Union[int, np.ndarray], extent: float
) -> Union[complex, np.ndarray]:
    """Closed form of ``int_0^extent exp(-i q u) sin(mode pi u / extent) du``.

    Equivalent to ``kappa (1 + exp(-i q L)) / (kappa^2 - q^2)`` with
    ``kappa = mode pi / L``; the removable singularity at ``|q| = kappa``
    evaluates to ``-+ i L / 2``.
    """
    if not extent > 0.0:
        raise InvalidParameterError(f"extent must be positive, got {extent!r}")
    mode = _check_modes(mode)
    omega = np.asarray(q, dtype=float) * extent
    value = extent * unit_phasor(-0.5 * omega) * aperture_profile(omega, mode)
    if np.ndim(value) == 0:
        return complex(value)
    return value


def aperture_integral_quadrature(
    q: float, mode: int, extent: float, tol: float = 1e-12, max_subdivisions: int = 2000
) -> complex:
    """Adaptive quadrature of the aperture integral (oracle for the closed form).

    The integral is rescaled to ``[0, 1]`` and the oscillatory factor is
    handed to QUADPACK's Fourier-weighted rule, so the subdivision count
    grows with ``q * extent`` instead of sampling every oscillation.

    Raises:
        InvalidParameterError: If ``tol`` or ``extent`` is not positive.
        ConvergenceError: If the subdivision budget is exhausted.
    """
    if not tol > 0.0:
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    if not extent > 0.0:
        raise InvalidParameterError(f"extent must be positive, got {extent!r}")
    mode = int(_check_modes(mode))
    omega = float(q) * extent
    theta = mode * math.pi

    def integrand(t: float) -> float:
        return math.sin(theta * t)

    def integrate(weight: Optional[str]) -> float:
        options = dict(epsabs=tol, epsrel=tol, limit=max_subdivisions, full_output=1)
        if weight is not None:
            options.update(weight=weight, wvar=omega)
        result = quad(integrand, 0.0, 1.0, **options)
        if len(result) > 3 and result[2].get("last", 0) >= max_subdivisions:
            raise ConvergenceError(
                f"quadrature did not converge for q={q!r}, mode={mode}, extent={extent!r}: "
                f"{result[3].strip()}"
            )
        return result[0]

    if omega == 0.0:
        return complex(extent * integrate(None), 0.0)
    real = integrate("cos")
    imag = -integrate("sin")
    return complex(extent * real, extent * imag)


def run_oracle_suite(
    cases: int = 1000, seed: int = 0, tol: float = 1e-13, resonance_every: int = 4
) -> OracleReport:
    """Compare closed form and quadrature on random ``(q, mode, extent)`` triples.

    Every ``resonance_every``-th case places ``|q|`` within ``1e-6`` relative
    of ``mode pi / extent``.  Errors are normalised by
    ``max(|reference|, 1e-3 * extent)``.
    """
    if cases < 1:
        raise InvalidParameterError(f"cases must be positive, got {cases!r}")
    rng = np.random.default_rng(seed)
    worst = (0.0, 0.0, 1, 1.0)
    for index in range(cases):
        extent = 10.0 ** rng.uniform(-8.0, -2.0)
        mode = 2 * int(rng.integers(0, 21)) + 1
        if index % resonance_every == 0:
            offset = 10.0 ** rng.uniform(-12.0, -6.0) * rng.choice([-1.0, 1.0])
            q = rng.choice([-1.0, 1.0]) * mode * math.pi / extent * (1.0 + offset)
        else:
            q = rng.uniform(-150.0, 150.0) / extent
        closed = aperture_integral_closed(q, mode, extent)
        reference = aperture_integral_quadrature(q, mode, extent, tol=tol)
        error = abs(closed - reference) / max(abs(reference), 1e-3 * extent)
        logger.debug("oracle case %d: q=%r mode=%d extent=%r error=%.3e", index, q, mode, extent, error)
        if error > worst[0]:
            worst = (error, q, mode, extent)
    return OracleReport(
        cases=cases,
        max_relative_error=worst[0],
        worst_q=worst[1],
        worst_mode=worst[2],
        worst_extent=worst[3],
    )


def phase_reference(
    point: ScreenPoint, kin: Kinematics, kernel: KernelChoice = KernelChoice.FRESNEL
) -> complex:
    """Common unit-modulus phase ``exp(i k r / 2)`` (fresnel) or ``exp(i k R)`` (rayleigh)."""
    if KernelChoice(kernel) is KernelChoice.RAYLEIGH:
        return unit_phasor(kin.k * point.r)
    return unit_phasor(0.5 * kin.k * point.r)


def rayleigh_obliquity(
    s: ArrayLike, R: ArrayLike, alpha: float, k: float
) -> Union[complex, np.ndarray]:
    """``(i k - 1/R) sqrt(cos^2(alpha) - (s/R)^2)``, zero on the branch point.

    Screen amplitudes use ``R = r = sqrt(l^2 + s^2) / cos(alpha)``, for
    which the radicand is ``cos^2(alpha) l^2 / (l^2 + s^2)`` and never
    negative.

    Raises:
        DomainError: If ``cos^2(alpha) < (s/R)^2`` somewhere.
    """
    s_arr = np.asarray(s, dtype=float)
    R_arr = np.asarray(R, dtype=float)
    cos_alpha = math.cos(alpha)
    radicand = cos_alpha * cos_alpha - (s_arr / R_arr) ** 2
    if np.any(radicand < 0.0):
        bad = float(np.broadcast_to(s_arr, radicand.shape)[radicand < 0.0].flat[0])
        raise DomainError(f"rayleigh obliquity factor undefined at s={bad!r}: cos^2(alpha) < (s/R)^2")
    result = (1j * k - 1.0 / R_arr) * np.sqrt(radicand)
    if np.ndim(result) == 0:
        return complex(result)
    return result


def _axis_wavevectors(modes: np.ndarray, extent: float, kin: Kinematics) -> Tuple[np.ndarray, np.ndarray]:
    """``(kappa^2, kz)`` of the modes of one axis with the other axis at rest."""
    kappa_sq = (np.asarray(modes, dtype=float) * math.pi / extent) ** 2
    return kappa_sq, np.sqrt(np.asarray(kin.k * kin.k - kappa_sq, dtype=complex))


def _axis_lag(modes: np.ndarray, extent: float, kin: Kinematics, geo: SlitGeometry) -> np.ndarray:
    kappa_sq, kz = _axis_wavevectors(modes, extent, kin)
    return through_slit_lag(kz, kappa_sq, kin.k, geo.thickness)


def _odd_square_tail(first: float) -> float:
    """``sum 1/j^2`` over odd ``j >= first``."""
    return float(polygamma(1, 0.5 * first)) / 4.0


def _full_profile_sum(omega: ArrayLike) -> Union[float, np.ndarray]:
    """``sum aperture_profile(omega, j) / j`` over every odd ``j``."""
    return 0.25 * math.pi * np.sinc(np.asarray(omega, dtype=float) / (2.0 * math.pi))


def _lag_deficit(first: int, extent: float, kin: Kinematics, geo: SlitGeometry) -> complex:
    """``sum (lag_j - 1) / j^2`` over odd ``j >= first`` along one slit axis.

    ``TAIL_TERMS`` terms are added one by one.  Past them the modes are
    either evanescent, contributing ``-1/j^2`` each, or their lag is the
    paraxial ``exp(-i eps j^2)`` and the remainder is integrated in closed
    form.
    """
    j = first + 2.0 * np.arange(TAIL_TERMS)
    total = complex(np.sum((_axis_lag(j, extent, kin, geo) - 1.0) / (j * j)))
    edge = float(j[-1]) + 1.0
    if edge > EVANESCENT_MARGIN * kin.k * extent / math.pi:
        return total - _odd_square_tail(edge + 1.0)
    eps = (math.pi / extent) ** 2 * geo.thickness / (2.0 * kin.k)
    root = np.sqrt(1j * eps)
    remainder = (
        (np.exp(-1j * eps * edge * edge) - 1.0) / edge
        - 1j * eps * math.sqrt(math.pi) / root * erfc(root * edge)
    )
    return total + 0.5 * complex(remainder)


@dataclass(frozen=True)
class _ModeSums:
    """Mode sums over n, one entry per y-mode ``2m+1``.

    ``across`` is the full x-sum ``b sum_i lag_i profile_i / i`` used for
    the y-modes past the truncation.
    """

    modes: np.ndarray
    plain: np.ndarray
    longitudinal: Optional[np.ndarray]
    across: complex


def _mode_sums(
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
    alpha: float,
) -> _ModeSums:
    m = np.arange(trunc.max_m + 1)[:, None]
    n = np.arange(trunc.max_n + 1)[None, :]
    kz = longitudinal_wavevectors(m, n, kin, geo)
    lag = through_slit_lag(kz, transverse_wavenumber_sq(m, n, geo), kin.k, geo.thickness)
    omega_x = kin.k * math.sin(alpha) * geo.length
    x_modes = 2 * n[0, :] + 1
    x_profiles = aperture_profile(omega_x, x_modes)
    # n > max_n: exact without the lag, lag deficit exact only at alpha = 0
    x_tail = (
        _full_profile_sum(omega_x) - np.sum(x_profiles / x_modes)
        + (2.0 / math.pi) * math.cos(0.5 * omega_x) * _lag_deficit(int(x_modes[-1]) + 2, geo.length, kin, geo)
    )
    weights = fourier_coefficients(m, n, amplitude) * lag * (geo.length * x_profiles[None, :])
    y_modes = 2 * m[:, 0] + 1
    x_lag = _axis_lag(x_modes, geo.length, kin, geo)
    row_tail = 16.0 * amplitude / (math.pi ** 2 * y_modes) * geo.length * lag[:, 0] / x_lag[0] * x_tail
    longitudinal = None
    if kernel is KernelChoice.RAYLEIGH:
        longitudinal = (weights * (1j * kz)).sum(axis=1) + row_tail * (1j * kz[:, -1])
    across = geo.length * (complex(np.sum(x_lag * x_profiles / x_modes)) + complex(x_tail))
    return _ModeSums(modes=y_modes, plain=weights.sum(axis=1) + row_tail, longitudinal=longitudinal, across=across)


def _reduced_amplitudes(
    s: np.ndarray,
    distance: float,
    alpha: float,
    centers: Tuple[float, ...],
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
) -> Tuple[np.ndarray, ...]:
    """Amplitudes at screen coordinates ``s`` with the common factors removed.

    ``centers`` are the y-offsets of the slit centres from the chosen
    phase origin; one amplitude array is returned per entry.
    """
    kernel = KernelChoice(kernel)
    sums = _mode_sums(kernel, trunc, kin, geo, amplitude, alpha)
    outputs = tuple(np.empty(s.shape, dtype=complex) for _ in centers)
    cos_alpha = math.cos(alpha)
    # y-modes past max_m: separable in x, summed one by one up to `reach`
    # (well past the aperture resonance), then closed form.
    last = int(sums.modes[-1])
    widest = kin.k * geo.width * float(np.max(np.abs(sin_beta(s, distance)))) if s.size else 0.0
    reach = max(TAIL_SPAN * (last + 1), TAIL_RESONANCE * widest / math.pi)
    extra = last + 2 * np.arange(1, int(math.ceil((reach - last) / 2.0)) + 1)
    extra_kappa_sq, extra_kz = _axis_wavevectors(extra, geo.width, kin)
    extra_lag = through_slit_lag(extra_kz, extra_kappa_sq, kin.k, geo.thickness)
    y_deficit = _lag_deficit(int(extra[-1]) + 2, geo.width, kin, geo)
    tail_scale = geo.width * 16.0 * amplitude / math.pi ** 2 * sums.across
    for start in range(0, s.size, CHUNK_SIZE):
        chunk = s[start:start + CHUNK_SIZE]
        sb = sin_beta(chunk, distance)
        r = np.hypot(distance, chunk) / cos_alpha
        q = kin.k * sb
        omega = q * geo.width
        unit = aperture_profile(omega[:, None], sums.modes[None, :])
        profiles = geo.width * unit
        beyond = aperture_profile(omega[:, None], extra[None, :])
        rest = (
            _full_profile_sum(omega) - unit @ (1.0 / sums.modes) - beyond @ (1.0 / extra)
            + (2.0 / math.pi) * np.cos(0.5 * omega) * y_deficit
        )
        tail = tail_scale * (beyond @ (extra_lag / extra) + rest)
        if kernel is KernelChoice.RAYLEIGH:
            obliquity = rayleigh_obliquity(chunk, r, alpha, kin.k)
            tail_longitudinal = tail_scale * (beyond @ (extra_lag * 1j * extra_kz / extra) + 1j * kin.k * rest)
            series = (
                profiles @ sums.longitudinal + tail_longitudinal
                + obliquity * (profiles @ sums.plain + tail)
            )
            prefactor = -1.0 / (4.0 * math.pi * r)
        else:
            series = profiles @ sums.plain + tail
            prefactor = FRESNEL_PHASE * (kin.k / (2.0 * math.pi * r)) ** 1.5
        for output, center in zip(outputs, centers):
            output[start:start + CHUNK_SIZE] = prefactor * series * unit_phasor(-q * center)
    return outputs


def screen_amplitudes(
    screen: ScreenGeometry,
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
    double: bool = True,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Reduced slit amplitudes over a screen scan, referred to the aperture axis.

    Returns ``(psi1, psi2)``; ``psi2`` is ``None`` when ``double`` is false.
    Intensities and cross terms formed from these arrays equal those of the
    full wavefunctions.
    """
    axis = geo.axis(double)
    centers = [0.5 * geo.width - axis]
    if double:
        centers.append(geo.pitch + 0.5 * geo.width - axis)
    result = _reduced_amplitudes(
        screen.positions, screen.distance, screen.alpha, tuple(centers),
        kernel, trunc, kin, geo, amplitude,
    )
    return result[0], (result[1] if double else None)


def slit_screen_wavefunction(
    slit: int,
    point: ScreenPoint,
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
) -> complex:
    """Full screen wavefunction of one slit, y measured from the slit-1 edge.

    Slit 2 integrates over ``[a + d, 2a + d]``; by the substitution
    ``u = y' - (a + d)`` it equals slit 1 times ``exp(-i q (a + d))``.
    """
    if slit not in (1, 2):
        raise InvalidParameterError(f"slit must be 1 or 2, got {slit!r}")
    distance = math.sqrt(max((point.r * math.cos(point.alpha)) ** 2 - point.s ** 2, 0.0))
    low, _ = geo.slit_range(slit)
    (reduced,) = _reduced_amplitudes(
        np.array([point.s]), distance, point.alpha, (low + 0.5 * geo.width,),
        kernel, trunc, kin, geo, amplitude,
    )
    common = (
        phase_reference(point, kin, kernel)
        * unit_phasor(kin.k * geo.thickness)
        * unit_phasor(-0.5 * kin.k * math.sin(point.alpha) * geo.length)
    )
    return complex(common * reduced[0])
