"""Least-squares calibration of the free model parameters against count data.

The amplitude ``A`` enters every pattern as ``A^2`` times a shape, so when
it is free it is profiled out in closed form
(``A^2 = sum(d * G) / sum(G^2)``).  The remaining shape parameters
(``c1`` and ``lambda_t``) are searched on a coarse grid over their bounds
and polished with a bounded Nelder-Mead simplex.  Everything is
deterministic: no random restarts.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ..errors import DomainError, InvalidParameterError
from ..utils.logger import get_logger
from .core import derive_kinematics
from .intensity import (
    DecoherenceSpec,
    Pattern,
    PatternComponents,
    SuperpositionSpec,
    alpha_from_lambda,
    pattern_components,
)

if TYPE_CHECKING:
    from ..config import RunConfig

logger = get_logger(__name__)

FIT_PARAMETERS = ("A", "c1", "lambda_t")
MIN_POINTS = 5
DEFAULT_BOUNDS: Dict[str, Tuple[float, float]] = {
    "A": (1e-300, math.inf),
    "c1": (0.0, 1.0),
    "lambda_t": (0.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class ExperimentalSeries:
    """Measured counts versus screen position, sorted by position."""

    positions: np.ndarray
    counts: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        positions = np.asarray(self.positions, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if positions.ndim != 1 or positions.shape != counts.shape:
            raise InvalidParameterError("positions and counts must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(positions)) and np.all(np.isfinite(counts))):
            raise InvalidParameterError("positions and counts must be finite")
        if np.any(np.diff(positions) <= 0.0):
            raise InvalidParameterError("positions must be strictly increasing")
        if np.any(counts < 0.0):
            raise InvalidParameterError("counts must be non-negative")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return int(self.positions.size)


@dataclass(frozen=True)
class FitSpec:
    """Which parameters to fit, their bounds and starting values.

    Attributes:
        free_params: Subset of ``("A", "c1", "lambda_t")``.
        bounds: Per-parameter ``(lower, upper)``; unspecified ones use the
            physical range.
        initial: Starting values; unspecified ones come from the run
            configuration.
        max_evaluations: Objective-evaluation budget.
        tolerance: Relative objective change that counts as converged.
        grid_points: Coarse-grid samples per shape parameter.
    """

    free_params: Tuple[str, ...] = ()
    bounds: Mapping[str, Tuple[float, float]] = field(default_factory=dict)
    initial: Mapping[str, float] = field(default_factory=dict)
    max_evaluations: int = 2000
    tolerance: float = 1e-10
    grid_points: int = 9

    def __post_init__(self) -> None:
        free = tuple(self.free_params)
        unknown = [p for p in free if p not in FIT_PARAMETERS]
        if unknown or len(set(free)) != len(free):
            raise InvalidParameterError(f"free_params must be distinct members of {FIT_PARAMETERS}, got {free!r}")
        object.__setattr__(self, "free_params", free)
        bounds = dict(DEFAULT_BOUNDS)
        for name, (lower, upper) in dict(self.bounds).items():
            if name not in FIT_PARAMETERS:
                raise InvalidParameterError(f"bounds given for unknown parameter {name!r}")
            bounds[name] = (float(lower), float(upper))
        for name, (lower, upper) in bounds.items():
            low, high = DEFAULT_BOUNDS[name]
            if not (low <= lower <= upper <= high):
                raise InvalidParameterError(f"infeasible bounds for {name}: [{lower!r}, {upper!r}]")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "initial", {k: float(v) for k, v in dict(self.initial).items()})
        if int(self.max_evaluations) < 1:
            raise InvalidParameterError(f"max_evaluations must be positive, got {self.max_evaluations!r}")
        if not self.tolerance > 0.0:
            raise InvalidParameterError(f"tolerance must be positive, got {self.tolerance!r}")
        if int(self.grid_points) < 2:
            raise InvalidParameterError(f"grid_points must be at least 2, got {self.grid_points!r}")


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of :func:`fit`.

    ``values`` holds ``A``, ``c1``, ``c2``, ``lambda_t`` and ``alpha_t``
    whether fitted or fixed.
    """

    values: Dict[str, float]
    objective: float
    evaluations: int
    converged: bool
    free_params: Tuple[str, ...]
    initial_objective: float
    pattern: Optional[Pattern] = None

    @property
    def contrast(self) -> float:
        """``2 c1 c2 lambda_t``, the fringe contrast the data actually pins down."""
        return 2.0 * self.values["c1"] * self.values["c2"] * self.values["lambda_t"]

    @property
    def scale(self) -> float:
        """``A^2 (1 + alpha_t^2)``, the overall intensity scale."""
        return self.values["A"] ** 2 * (1.0 + self.values["alpha_t"] ** 2)

    def as_report(self) -> Dict[str, Any]:
        return {
            "values": dict(self.values),
            "objective": self.objective,
            "initial_objective": self.initial_objective,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "free_params": list(self.free_params),
            "contrast": self.contrast,
            "scale": self.scale,
        }


def residual_ss(model_pattern: Pattern, data: ExperimentalSeries) -> float:
    """Sum of squared residuals, the model linearly interpolated at the data positions.

    Raises:
        DomainError: If a data position lies outside the model's range.
    """
    if data.positions[0] < model_pattern.positions[0] or data.positions[-1] > model_pattern.positions[-1]:
        raise DomainError(
            f"data range [{data.positions[0]!r}, {data.positions[-1]!r}] exceeds model range "
            f"[{model_pattern.positions[0]!r}, {model_pattern.positions[-1]!r}]"
        )
    model = np.interp(data.positions, model_pattern.positions, model_pattern.intensities)
    return float(np.sum((model - data.counts) ** 2))


class _ShapeModel:
    """Unit-amplitude pattern as a function of ``c1`` and ``lambda_t``."""

    def __init__(self, components: PatternComponents, single: bool, coherent: bool) -> None:
        self.components = components
        self.single = single
        self.coherent = coherent

    def shape(self, c1: float, lambda_t: float) -> np.ndarray:
        if self.single:
            return self.components.single1
        spec = SuperpositionSpec.from_c1(c1)
        deco = None if self.coherent else DecoherenceSpec.from_lambda(lambda_t)
        return self.components.combine(1.0, spec, deco)

    def pattern(self, values: Mapping[str, float]) -> Pattern:
        intensities = values["A"] ** 2 * self.shape(values["c1"], values["lambda_t"])
        return Pattern(self.components.positions, intensities, self.components.metadata)


def _allowed_parameters(mode: str) -> Tuple[str, ...]:
    if mode == "single":
        return ("A",)
    if mode == "double-coherent":
        return ("A", "c1")
    return FIT_PARAMETERS


def _best_amplitude_sq(shape: np.ndarray, counts: np.ndarray, bounds: Tuple[float, float]) -> float:
    norm = float(np.dot(shape, shape))
    lower, upper = bounds
    if norm == 0.0:
        return lower * lower
    best = float(np.dot(counts, shape)) / norm
    return min(max(best, lower * lower), upper * upper)


def fit(model_config: "RunConfig", data: ExperimentalSeries, spec: FitSpec) -> FitResult:
    """Fit ``spec.free_params`` of ``model_config`` to ``data``.

    Runs out of budget are reported through ``converged=False``; they are
    not errors.

    Raises:
        InvalidParameterError: If the data has fewer than five points or a
            free parameter does not exist in the configured mode.
        DomainError: If the data extends beyond the configured screen scan.
    """
    if len(data) < MIN_POINTS:
        raise InvalidParameterError(f"fit needs at least {MIN_POINTS} data points, got {len(data)}")
    mode = model_config.mode.value
    allowed = _allowed_parameters(mode)
    for name in spec.free_params:
        if name not in allowed:
            raise InvalidParameterError(f"parameter {name!r} cannot be fitted in mode {mode!r}")
    if "c1" in spec.free_params and "lambda_t" in spec.free_params:
        logger.warning(
            "c1 and lambda_t are only identifiable through 2*c1*c2*lambda_t; "
            "individual values depend on the starting point"
        )

    start = {
        "A": model_config.physics.amplitude,
        "c1": model_config.superposition.c1,
        "lambda_t": model_config.decoherence.lambda_t if model_config.decoherence else 1.0,
    }
    start.update(spec.initial)
    for name in spec.free_params:
        lower, upper = spec.bounds[name]
        start[name] = min(max(start[name], lower), upper)

    components = pattern_components(
        model_config.screen.geometry(),
        model_config.kernel,
        model_config.truncation,
        derive_kinematics(model_config.physics),
        model_config.geometry,
    )
    model = _ShapeModel(components, single=(mode == "single"), coherent=(mode == "double-coherent"))
    # Validates the data range once; later evaluations reuse the interpolated components.
    initial_objective = residual_ss(model.pattern(start), data)
    positions = components.positions
    counts = data.counts
    norm = max(float(np.dot(counts, counts)), 1e-300)
    shape_names = [p for p in spec.free_params if p != "A"]
    profile_amplitude = "A" in spec.free_params

    def values_at(unit: Sequence[float]) -> Dict[str, float]:
        values = dict(start)
        for name, u in zip(shape_names, unit):
            lower, upper = spec.bounds[name]
            values[name] = lower + float(np.clip(u, 0.0, 1.0)) * (upper - lower)
        shape = np.interp(data.positions, positions, model.shape(values["c1"], values["lambda_t"]))
        if profile_amplitude:
            values["A"] = math.sqrt(_best_amplitude_sq(shape, counts, spec.bounds["A"]))
        values["_objective"] = float(np.sum((values["A"] ** 2 * shape - counts) ** 2))
        return values

    def objective(unit: Sequence[float]) -> float:
        return values_at(unit)["_objective"] / norm

    evaluations = 1
    converged = True
    if shape_names:
        def to_unit(name: str) -> float:
            lower, upper = spec.bounds[name]
            return 0.0 if upper == lower else (start[name] - lower) / (upper - lower)

        axis = np.linspace(0.0, 1.0, int(spec.grid_points))
        candidates = [tuple(to_unit(n) for n in shape_names)]
        candidates.extend(itertools.product(axis, repeat=len(shape_names)))
        scores = [objective(c) for c in candidates]
        evaluations += len(candidates)
        best_index = int(np.argmin(scores))
        best_unit, best_score = np.array(candidates[best_index], dtype=float), scores[best_index]
        logger.debug("coarse grid best %.6e at %s", best_score, best_unit)
        remaining = int(spec.max_evaluations) - evaluations
        if remaining > 0:
            result = minimize(
                objective,
                best_unit,
                method="Nelder-Mead",
                bounds=[(0.0, 1.0)] * len(shape_names),
                options={
                    "maxfev": remaining,
                    "xatol": 1e-9,
                    "fatol": spec.tolerance * max(best_score, 1e-15),
                },
            )
            evaluations += int(result.nfev)
            converged = bool(result.success)
            if result.fun <= best_score:
                best_unit = np.asarray(result.x, dtype=float)
        else:
            converged = False
        final = values_at(best_unit)
    else:
        final = values_at(())

    final.pop("_objective")
    fitted = model.pattern(final)
    objective_value = residual_ss(fitted, data)
    final["c2"] = math.sqrt(max(1.0 - final["c1"] ** 2, 0.0))
    final["alpha_t"] = alpha_from_lambda(final["lambda_t"])
    if not converged:
        logger.warning("fit stopped after %d evaluations without converging", evaluations)
    logger.info(
        "fit of %s: objective %.6e (initial %.6e) after %d evaluations",
        ",".join(spec.free_params) or "nothing", objective_value, initial_objective, evaluations,
    )
    return FitResult(
        values=final,
        objective=objective_value,
        evaluations=evaluations,
        converged=converged,
        free_params=spec.free_params,
        initial_objective=initial_objective,
        pattern=fitted,
    )
