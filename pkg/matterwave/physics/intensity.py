"""Relative intensity patterns, environment damping and fringe analysis.

Patterns are built from the reduced slit amplitudes of
``propagation.screen_amplitudes``:

* single slit: ``I = |psi1|^2``
* coherent double slit: ``I = |c1 psi1 + c2 psi2|^2``
* environment-damped double slit:
  ``I = (1 + alpha_t^2) [c1^2 |psi1|^2 + c2^2 |psi2|^2 + 2 c1 c2 Lambda_t Re(psi1* psi2)]``

The mode counts are refined by doubling until the peak-relative change of
the pattern falls below ``ModeTruncation.tail_tol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..errors import AnalysisError, InvalidParameterError
from ..utils.logger import get_logger
from .core import Kinematics, ScreenGeometry, SlitGeometry
from .propagation import KernelChoice, screen_amplitudes
from .slit_modes import ModeTruncation

logger = get_logger(__name__)

NORMALIZATION_TOLERANCE = 1e-3
"""Accepted deviation of ``c1^2 + c2^2`` from one (published pairs are rounded)."""


def _unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidParameterError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def lambda_from_alpha(alpha_t: float) -> float:
    """Coherence degree ``Lambda_t = 2 alpha_t / (1 + alpha_t^2)``."""
    alpha_t = _unit_interval("alpha_t", alpha_t)
    return 2.0 * alpha_t / (1.0 + alpha_t * alpha_t)


def alpha_from_lambda(lambda_t: float) -> float:
    """Inverse of :func:`lambda_from_alpha` on ``[0, 1]``.

    Evaluated as ``Lambda / (1 + sqrt(1 - Lambda^2))``, which equals
    ``(1 - sqrt(1 - Lambda^2)) / Lambda`` without its cancellation near 0.
    """
    lambda_t = _unit_interval("lambda_t", lambda_t)
    return lambda_t / (1.0 + math.sqrt(1.0 - lambda_t * lambda_t))


@dataclass(frozen=True)
class SuperpositionSpec:
    """Superposition coefficients of the two slit states."""

    c1: float
    c2: float

    def __post_init__(self) -> None:
        c1, c2 = float(self.c1), float(self.c2)
        if c1 < 0.0 or c2 < 0.0 or not (math.isfinite(c1) and math.isfinite(c2)):
            raise InvalidParameterError(f"c1 and c2 must be non-negative, got ({c1!r}, {c2!r})")
        norm = c1 * c1 + c2 * c2
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise InvalidParameterError(f"c1^2 + c2^2 must equal 1 within 1e-3, got {norm!r}")
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @classmethod
    def from_c1(cls, c1: float) -> "SuperpositionSpec":
        """Build the spec with ``c2 = sqrt(1 - c1^2)``."""
        c1 = _unit_interval("c1", c1)
        return cls(c1=c1, c2=math.sqrt(1.0 - c1 * c1))


@dataclass(frozen=True)
class DecoherenceSpec:
    """Environment overlap ``|alpha_t|``; ``lambda_t`` is derived from it."""

    alpha_t: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha_t", _unit_interval("alpha_t", self.alpha_t))

    @property
    def lambda_t(self) -> float:
        return lambda_from_alpha(self.alpha_t)

    @property
    def damping(self) -> float:
        """The ``1 + alpha_t^2`` prefactor."""
        return 1.0 + self.alpha_t * self.alpha_t

    @classmethod
    def from_lambda(cls, lambda_t: float) -> "DecoherenceSpec":
        return cls(alpha_t=alpha_from_lambda(lambda_t))


@dataclass(frozen=True, eq=False)
class Pattern:
    """Sampled relative intensity on the screen.

    Attributes:
        positions: Strictly increasing screen coordinates ``s`` (m).
        intensities: Non-negative relative intensities, one per position.
        metadata: Snapshot of the parameters that produced the pattern.
    """

    positions: np.ndarray
    intensities: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        positions = np.array(self.positions, dtype=float)
        intensities = np.array(self.intensities, dtype=float)
        if positions.ndim != 1 or positions.shape != intensities.shape or positions.size == 0:
            raise InvalidParameterError("positions and intensities must be 1-D arrays of equal length")
        if np.any(np.diff(positions) <= 0.0):
            raise InvalidParameterError("pattern positions must be strictly increasing")
        if not np.all(np.isfinite(intensities)) or np.any(intensities < 0.0):
            raise InvalidParameterError("pattern intensities must be finite and non-negative")
        positions.setflags(write=False)
        intensities.setflags(write=False)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "intensities", intensities)
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __len__(self) -> int:
        return int(self.positions.size)

    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.positions.tolist(), self.intensities.tolist()))


@dataclass(frozen=True, eq=False)
class PatternComponents:
    """Unit-amplitude building blocks of every double-slit pattern.

    ``single1 = |psi1|^2``, ``single2 = |psi2|^2`` and
    ``cross = Re(psi1* psi2)``, all at ``A = 1``.
    """

    positions: np.ndarray
    single1: np.ndarray
    single2: np.ndarray
    cross: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def combine(
        self, amplitude: float, spec: SuperpositionSpec, deco: Optional[DecoherenceSpec] = None
    ) -> np.ndarray:
        """Intensity for the given amplitude, coefficients and damping."""
        coherence = 1.0 if deco is None else deco.lambda_t
        damping = 1.0 if deco is None else deco.damping
        incoherent = spec.c1 ** 2 * self.single1 + spec.c2 ** 2 * self.single2
        total = incoherent + 2.0 * spec.c1 * spec.c2 * coherence * self.cross
        return np.maximum(amplitude * amplitude * damping * total, 0.0)


Evaluator = Callable[[ModeTruncation], Tuple[np.ndarray, ...]]


def _refine(
    evaluate: Evaluator,
    measure: Callable[[Tuple[np.ndarray, ...]], np.ndarray],
    trunc: ModeTruncation,
) -> Tuple[Tuple[np.ndarray, ...], Dict[str, Any]]:
    """Double the mode counts until ``measure`` settles below ``trunc.tail_tol``."""
    current = trunc
    arrays = evaluate(current)
    last_change: Optional[float] = None
    converged: Optional[bool] = None
    for step in range(trunc.max_refinements):
        finer = current.doubled()
        finer_arrays = evaluate(finer)
        before, after = measure(arrays), measure(finer_arrays)
        peak = float(np.max(np.abs(after)))
        last_change = float(np.max(np.abs(after - before))) / peak if peak > 0.0 else 0.0
        logger.debug(
            "refinement %d: modes %dx%d -> %dx%d, relative change %.3e",
            step + 1, current.max_m, current.max_n, finer.max_m, finer.max_n, last_change,
        )
        current, arrays = finer, finer_arrays
        converged = last_change < trunc.tail_tol
        if converged:
            break
    if converged is False:
        logger.warning(
            "mode sum not converged at %dx%d modes: relative change %.3e exceeds %.3e",
            current.max_m, current.max_n, last_change, trunc.tail_tol,
        )
    metadata = {
        "max_m": current.max_m,
        "max_n": current.max_n,
        "last_change": last_change,
        "converged": converged,
    }
    return arrays, metadata


def _run_metadata(
    mode: str, scan: ScreenGeometry, kernel: KernelChoice, kin: Kinematics, geo: SlitGeometry, amplitude: float
) -> Dict[str, Any]:
    return {
        "mode": mode,
        "kernel": KernelChoice(kernel).value,
        "k": kin.k,
        "wavelength": kin.wavelength,
        "width": geo.width,
        "length": geo.length,
        "thickness": geo.thickness,
        "gap": geo.gap,
        "distance": scan.distance,
        "alpha": scan.alpha,
        "amplitude": amplitude,
    }


def intensity_single(
    scan: ScreenGeometry,
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
) -> Pattern:
    """Single-slit pattern ``|psi1|^2``, ``s`` measured from the slit centre."""

    def evaluate(t: ModeTruncation) -> Tuple[np.ndarray, ...]:
        psi1, _ = screen_amplitudes(scan, kernel, t, kin, geo, amplitude, double=False)
        return (np.abs(psi1) ** 2,)

    (intensity,), refinement = _refine(evaluate, lambda arrays: arrays[0], trunc)
    metadata = _run_metadata("single", scan, kernel, kin, geo, amplitude)
    metadata.update(refinement)
    logger.info("single-slit pattern computed at %d screen points", len(scan))
    return Pattern(scan.positions, intensity, metadata)


def _double_amplitudes(
    scan: ScreenGeometry, kernel: KernelChoice, kin: Kinematics, geo: SlitGeometry, amplitude: float
) -> Evaluator:
    def evaluate(t: ModeTruncation) -> Tuple[np.ndarray, ...]:
        psi1, psi2 = screen_amplitudes(scan, kernel, t, kin, geo, amplitude, double=True)
        return psi1, psi2

    return evaluate


def intensity_double_coherent(
    scan: ScreenGeometry,
    spec: SuperpositionSpec,
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
) -> Pattern:
    """Coherent superposition ``|c1 psi1 + c2 psi2|^2``."""

    def measure(arrays: Tuple[np.ndarray, ...]) -> np.ndarray:
        return np.abs(spec.c1 * arrays[0] + spec.c2 * arrays[1]) ** 2

    arrays, refinement = _refine(_double_amplitudes(scan, kernel, kin, geo, amplitude), measure, trunc)
    metadata = _run_metadata("double-coherent", scan, kernel, kin, geo, amplitude)
    metadata.update(c1=spec.c1, c2=spec.c2, **refinement)
    logger.info("coherent double-slit pattern computed at %d screen points", len(scan))
    return Pattern(scan.positions, measure(arrays), metadata)


def intensity_double_decoherent(
    scan: ScreenGeometry,
    spec: SuperpositionSpec,
    deco: DecoherenceSpec,
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
    amplitude: float,
) -> Pattern:
    """Environment-damped pattern with coherence degree ``deco.lambda_t``.

    Formed as ``(1 + alpha^2) [Lambda |c1 psi1 + c2 psi2|^2 + (1 - Lambda)
    (c1^2 |psi1|^2 + c2^2 |psi2|^2)]``, algebraically the damped formula and
    non-negative term by term.
    """
    coherence = deco.lambda_t

    def measure(arrays: Tuple[np.ndarray, ...]) -> np.ndarray:
        psi1, psi2 = arrays
        coherent = np.abs(spec.c1 * psi1 + spec.c2 * psi2) ** 2
        incoherent = spec.c1 ** 2 * np.abs(psi1) ** 2 + spec.c2 ** 2 * np.abs(psi2) ** 2
        return deco.damping * (coherence * coherent + (1.0 - coherence) * incoherent)

    arrays, refinement = _refine(_double_amplitudes(scan, kernel, kin, geo, amplitude), measure, trunc)
    metadata = _run_metadata("double-decoherent", scan, kernel, kin, geo, amplitude)
    metadata.update(c1=spec.c1, c2=spec.c2, alpha_t=deco.alpha_t, lambda_t=coherence, **refinement)
    logger.info("damped double-slit pattern computed at %d screen points (Lambda=%.4f)", len(scan), coherence)
    return Pattern(scan.positions, measure(arrays), metadata)


def pattern_components(
    scan: ScreenGeometry,
    kernel: KernelChoice,
    trunc: ModeTruncation,
    kin: Kinematics,
    geo: SlitGeometry,
) -> PatternComponents:
    """Unit-amplitude ``|psi1|^2``, ``|psi2|^2`` and ``Re(psi1* psi2)`` over ``scan``."""

    def measure(arrays: Tuple[np.ndarray, ...]) -> np.ndarray:
        return np.abs(arrays[0] + arrays[1]) ** 2

    (psi1, psi2), refinement = _refine(_double_amplitudes(scan, kernel, kin, geo, 1.0), measure, trunc)
    metadata = _run_metadata("components", scan, kernel, kin, geo, 1.0)
    metadata.update(refinement)
    return PatternComponents(
        positions=scan.positions,
        single1=np.abs(psi1) ** 2,
        single2=np.abs(psi2) ** 2,
        cross=np.real(np.conj(psi1) * psi2),
        metadata=metadata,
    )


def _plateau_extrema(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Indices of strict interior maxima and minima; plateaus report their leftmost sample."""
    starts = np.flatnonzero(np.concatenate(([True], np.diff(values) != 0.0)))
    levels = values[starts]
    if levels.size < 3:
        return np.array([], dtype=int), np.array([], dtype=int)
    middle, left, right = levels[1:-1], levels[:-2], levels[2:]
    maxima = starts[1:-1][(middle > left) & (middle > right)]
    minima = starts[1:-1][(middle < left) & (middle < right)]
    return maxima, minima


def _central_extrema(pattern: Pattern) -> Tuple[int, Optional[int], Optional[int]]:
    values = pattern.intensities
    maxima, minima = _plateau_extrema(values)
    if maxima.size == 0:
        raise AnalysisError("pattern has no interior maximum")
    central = int(maxima[np.argmax(values[maxima])])
    left = minima[minima < central]
    right = minima[minima > central]
    return (
        central,
        int(left[-1]) if left.size else None,
        int(right[0]) if right.size else None,
    )


def fringe_visibility(pattern: Pattern) -> float:
    """``(I_max - I_min) / (I_max + I_min)`` of the central maximum and its first minimum.

    The central maximum is the largest strict interior maximum (leftmost on
    ties).  Of the two minima flanking it the nearer one is used, the left
    one when both are equally far.

    Raises:
        AnalysisError: If no maximum with an adjacent minimum exists.
    """
    central, left, right = _central_extrema(pattern)
    candidates = [i for i in (left, right) if i is not None]
    if not candidates:
        raise AnalysisError("no fringe minimum next to the central maximum")
    nearest = min(candidates, key=lambda i: (abs(i - central), i))
    i_max = float(pattern.intensities[central])
    i_min = float(pattern.intensities[nearest])
    return (i_max - i_min) / (i_max + i_min)


def visibility_at_period(pattern: Pattern, period: float, center: float = 0.0) -> float:
    """Contrast between ``I(center)`` and the mean of ``I(center +- period / 2)``.

    Defined also for patterns whose fringes have washed out, where
    :func:`fringe_visibility` finds no minimum.  Values are linearly
    interpolated between samples.

    Raises:
        AnalysisError: If the probed positions fall outside the pattern.
    """
    if not period > 0.0:
        raise InvalidParameterError(f"period must be positive, got {period!r}")
    probes = np.array([center - 0.5 * period, center, center + 0.5 * period])
    if probes[0] < pattern.positions[0] or probes[-1] > pattern.positions[-1]:
        raise AnalysisError("probe positions lie outside the pattern")
    side_a, middle, side_b = np.interp(probes, pattern.positions, pattern.intensities)
    side = 0.5 * (side_a + side_b)
    if middle + side == 0.0:
        raise AnalysisError("pattern vanishes at the probe positions")
    return float(abs(middle - side) / (middle + side))


def _vertex(positions: np.ndarray, values: np.ndarray, index: int) -> float:
    """Abscissa of the parabola through samples ``index - 1 .. index + 1``."""
    x0, x1, x2 = positions[index - 1:index + 2]
    y0, y1, y2 = values[index - 1:index + 2]
    numerator = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    denominator = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if denominator == 0.0:
        return float(x1)
    return float(x1 - 0.5 * numerator / denominator)


def fringe_period(pattern: Pattern) -> float:
    """Distance between the two minima that flank the central maximum.

    Raises:
        AnalysisError: If either flanking minimum is missing.
    """
    _, left, right = _central_extrema(pattern)
    if left is None or right is None:
        raise AnalysisError("central maximum is not flanked by two minima")
    return _vertex(pattern.positions, pattern.intensities, right) - _vertex(
        pattern.positions, pattern.intensities, left
    )


def first_minimum_offset(pattern: Pattern) -> float:
    """Distance from the central maximum to the nearer flanking minimum."""
    central, left, right = _central_extrema(pattern)
    peak = _vertex(pattern.positions, pattern.intensities, central)
    offsets = [
        abs(_vertex(pattern.positions, pattern.intensities, i) - peak)
        for i in (left, right)
        if i is not None
    ]
    if not offsets:
        raise AnalysisError("no minimum next to the central maximum")
    return min(offsets)


def expected_fringe_period(kin: Kinematics, geo: SlitGeometry, distance: float) -> float:
    """Far-field fringe period ``lambda l / (a + d)``."""
    return kin.wavelength * distance / geo.pitch


def expected_first_zero(kin: Kinematics, geo: SlitGeometry, distance: float) -> float:
    """Far-field first single-slit zero ``lambda l / a``."""
    return kin.wavelength * distance / geo.width

