"""Configuration loading for the matter-wave diffraction simulator.

Two layers are kept apart:

* ``Settings`` holds process-wide options read from the environment
  (optionally from a ``.env`` file via ``python-dotenv``): log level and
  log file.
* ``RunConfig`` describes one simulation or fit.  It is read from an INI
  file whose only required key is ``[run] mode``; every other key falls
  back to the experimental preset of that mode shipped in
  ``matterwave/data``.

Example run file::

    [run]
    mode = double-decoherent

    [decoherence]
    lambda_t = 0.75
"""
from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, TypeVar, Union

from .errors import ConfigError, InvalidParameterError, MissingKeyError, ValidationError
from .physics.calibration import DEFAULT_BOUNDS, FIT_PARAMETERS, FitSpec
from .physics.core import PhysicalParams, ScreenGeometry, SlitGeometry
from .physics.intensity import DecoherenceSpec, SuperpositionSpec
from .physics.propagation import KernelChoice
from .physics.slit_modes import ModeTruncation
from .utils.logger import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
PathLike = Union[str, Path]

SECTION_KEYS: Dict[str, Tuple[str, ...]] = {
    "run": ("mode", "kernel", "output"),
    "physics": ("mass", "velocity", "hbar", "amplitude"),
    "geometry": ("width", "length", "thickness", "gap"),
    "screen": ("distance", "s_min", "s_max", "n_points", "alpha"),
    "superposition": ("c1", "c2"),
    "decoherence": ("alpha_t", "lambda_t"),
    "numerics": ("max_m", "max_n", "tail_tol", "max_refinements"),
    "fit": ("free", "max_evaluations", "tolerance", "grid_points")
    + tuple(f"{p}_{suffix}" for p in FIT_PARAMETERS for suffix in ("min", "max", "initial")),
}


def _load_dotenv_if_available() -> None:
    """Load variables from a ``.env`` file when ``python-dotenv`` is installed."""
    try:
        from dotenv import load_dotenv  # type: ignore[import]
    except Exception:
        # Without python-dotenv the environment must be set directly
        return
    load_dotenv()


@dataclass(frozen=True)
class Settings:
    """Process-wide settings.

    Attributes:
        log_level: Name of the root log level (``MATTERWAVE_LOG_LEVEL``).
        log_file: Optional log file path (``MATTERWAVE_LOG_FILE``); empty
            means console only.
    """

    log_level: str = "INFO"
    log_file: str = ""

    @classmethod
    def load(cls) -> "Settings":
        _load_dotenv_if_available()
        return cls(
            log_level=os.getenv("MATTERWAVE_LOG_LEVEL", "INFO"),
            log_file=os.getenv("MATTERWAVE_LOG_FILE", ""),
        )


class Mode(str, Enum):
    SINGLE = "single"
    DOUBLE_COHERENT = "double-coherent"
    DOUBLE_DECOHERENT = "double-decoherent"

    @property
    def double(self) -> bool:
        return self is not Mode.SINGLE


@dataclass(frozen=True)
class ScanSpec:
    """Uniform screen scan ``n_points`` samples over ``[s_min, s_max]``."""

    distance: float
    s_min: float
    s_max: float
    n_points: int
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidParameterError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not self.s_min < self.s_max:
            raise InvalidParameterError(f"s_min must be below s_max, got {self.s_min!r} >= {self.s_max!r}")
        if not self.distance > 0.0:
            raise InvalidParameterError(f"distance must be positive, got {self.distance!r}")
        if not abs(self.alpha) < 0.5 * math.pi:
            raise InvalidParameterError(f"alpha must lie in (-pi/2, pi/2), got {self.alpha!r}")
        object.__setattr__(self, "n_points", int(self.n_points))

    def geometry(self) -> ScreenGeometry:
        return ScreenGeometry.uniform(self.distance, self.s_min, self.s_max, self.n_points, self.alpha)


@dataclass(frozen=True)
class RunConfig:
    """Everything one ``single``/``double``/``fit`` run needs.

    ``decoherence`` is set only in ``double-decoherent`` mode and ``fit``
    only when the file has a ``[fit]`` section.
    """

    mode: Mode
    physics: PhysicalParams
    geometry: SlitGeometry
    screen: ScanSpec
    superposition: SuperpositionSpec
    kernel: KernelChoice
    truncation: ModeTruncation
    output: str
    decoherence: Optional[DecoherenceSpec] = None
    fit: Optional[FitSpec] = None


class _Source:
    """Key lookup over a user file layered on a preset."""

    def __init__(self, user: configparser.ConfigParser, preset: configparser.ConfigParser) -> None:
        self.user = user
        self.preset = preset

    def given(self, section: str, key: str) -> bool:
        return self.user.has_option(section, key)

    def raw(self, section: str, key: str) -> str:
        for parser in (self.user, self.preset):
            if parser.has_option(section, key):
                return parser.get(section, key).strip()
        raise MissingKeyError(f"{section}.{key}")

    def number(self, section: str, key: str, kind: Callable[[str], T] = float) -> T:
        text = self.raw(section, key)
        try:
            return kind(text)
        except ValueError:
            raise ValidationError(f"{section}.{key}", f"not a valid {kind.__name__}: {text!r}") from None


def _parser() -> configparser.ConfigParser:
    # Interpolation off: values are plain numbers and names.
    return configparser.ConfigParser(interpolation=None)


def _read_preset(mode: Mode) -> configparser.ConfigParser:
    parser = _parser()
    text = resources.files("matterwave.data").joinpath(f"{mode.value}.cfg").read_text(encoding="utf-8")
    parser.read_string(text, source=f"{mode.value}.cfg")
    return parser


def _build(key_path: str, factory: Callable[..., T], **kwargs) -> T:
    try:
        return factory(**kwargs)
    except InvalidParameterError as exc:
        raise ValidationError(key_path, str(exc)) from None


def _check_keys(user: configparser.ConfigParser) -> None:
    for section in user.sections():
        if section not in SECTION_KEYS:
            raise ValidationError(section, "unknown section")
        # configparser lower-cases option names
        known = {key.lower() for key in SECTION_KEYS[section]}
        for key in user.options(section):
            if key not in known:
                raise ValidationError(f"{section}.{key}", "unknown key")


def _superposition(source: _Source) -> SuperpositionSpec:
    has_c1, has_c2 = source.given("superposition", "c1"), source.given("superposition", "c2")
    if has_c1 and not has_c2:
        c1 = source.number("superposition", "c1")
        return _build("superposition.c1", SuperpositionSpec.from_c1, c1=c1)
    if has_c2 and not has_c1:
        c2 = source.number("superposition", "c2")
        if not 0.0 <= c2 <= 1.0:
            raise ValidationError("superposition.c2", f"must lie in [0, 1], got {c2!r}")
        return _build("superposition.c2", SuperpositionSpec, c1=math.sqrt(1.0 - c2 * c2), c2=c2)
    c1 = source.number("superposition", "c1")
    if not has_c1 and not source.preset.has_option("superposition", "c2"):
        return _build("superposition.c1", SuperpositionSpec.from_c1, c1=c1)
    c2 = source.number("superposition", "c2")
    return _build("superposition.c1", SuperpositionSpec, c1=c1, c2=c2)


def _decoherence(source: _Source) -> DecoherenceSpec:
    parser = source.user
    if not (parser.has_option("decoherence", "alpha_t") or parser.has_option("decoherence", "lambda_t")):
        parser = source.preset
    has_alpha = parser.has_option("decoherence", "alpha_t")
    has_lambda = parser.has_option("decoherence", "lambda_t")
    if not has_alpha and not has_lambda:
        raise MissingKeyError("decoherence.lambda_t")
    if has_alpha:
        spec = _build("decoherence.alpha_t", DecoherenceSpec, alpha_t=source.number("decoherence", "alpha_t"))
        if has_lambda:
            lambda_t = source.number("decoherence", "lambda_t")
            if abs(spec.lambda_t - lambda_t) > 1e-9:
                raise ValidationError(
                    "decoherence.lambda_t", f"inconsistent with alpha_t (expected {spec.lambda_t!r})"
                )
        return spec
    return _build(
        "decoherence.lambda_t", DecoherenceSpec.from_lambda, lambda_t=source.number("decoherence", "lambda_t")
    )


def _fit_spec(user: configparser.ConfigParser) -> Optional[FitSpec]:
    if not user.has_section("fit"):
        return None
    source = _Source(user, _parser())
    section = user["fit"]
    free = tuple(p.strip() for p in section.get("free", "").split(",") if p.strip())
    bounds: Dict[str, Tuple[float, float]] = {}
    initial: Dict[str, float] = {}
    for name in FIT_PARAMETERS:
        if f"{name}_min" in section or f"{name}_max" in section:
            default_low, default_high = DEFAULT_BOUNDS[name]
            low = source.number("fit", f"{name}_min") if f"{name}_min" in section else default_low
            high = source.number("fit", f"{name}_max") if f"{name}_max" in section else default_high
            bounds[name] = (low, high)
        if f"{name}_initial" in section:
            initial[name] = source.number("fit", f"{name}_initial")
    options = {}
    if "max_evaluations" in section:
        options["max_evaluations"] = source.number("fit", "max_evaluations", int)
    if "tolerance" in section:
        options["tolerance"] = source.number("fit", "tolerance")
    if "grid_points" in section:
        options["grid_points"] = source.number("fit", "grid_points", int)
    return _build("fit", FitSpec, free_params=free, bounds=bounds, initial=initial, **options)


def _enum(key_path: str, kind: Callable[[str], T], text: str) -> T:
    try:
        return kind(text)
    except ValueError:
        raise ValidationError(key_path, f"unsupported value {text!r}") from None


def parse_config(text: str, source_name: str = "<string>") -> RunConfig:
    """Parse run-configuration text; see :func:`load_config`."""
    user = _parser()
    try:
        user.read_string(text, source=source_name)
    except configparser.Error as exc:
        raise ConfigError(f"{source_name}: {exc}") from None
    _check_keys(user)
    if not user.has_option("run", "mode"):
        raise MissingKeyError("run.mode")
    mode = _enum("run.mode", Mode, user.get("run", "mode").strip())
    source = _Source(user, _read_preset(mode))

    physics = _build(
        "physics",
        PhysicalParams,
        mass=source.number("physics", "mass"),
        velocity=source.number("physics", "velocity"),
        hbar=source.number("physics", "hbar"),
        amplitude=source.number("physics", "amplitude"),
    )
    geometry = _build(
        "geometry",
        SlitGeometry,
        width=source.number("geometry", "width"),
        length=source.number("geometry", "length"),
        thickness=source.number("geometry", "thickness"),
        gap=source.number("geometry", "gap"),
    )
    screen = _build(
        "screen",
        ScanSpec,
        distance=source.number("screen", "distance"),
        s_min=source.number("screen", "s_min"),
        s_max=source.number("screen", "s_max"),
        n_points=source.number("screen", "n_points", int),
        alpha=source.number("screen", "alpha"),
    )
    truncation = _build(
        "numerics",
        ModeTruncation,
        max_m=source.number("numerics", "max_m", int),
        max_n=source.number("numerics", "max_n", int),
        tail_tol=source.number("numerics", "tail_tol"),
        max_refinements=source.number("numerics", "max_refinements", int),
    )
    decoherence = _decoherence(source) if mode is Mode.DOUBLE_DECOHERENT else None
    if decoherence is None and user.has_section("decoherence"):
        logger.debug("ignoring [decoherence] in %s mode", mode.value)
    config = RunConfig(
        mode=mode,
        physics=physics,
        geometry=geometry,
        screen=screen,
        superposition=_superposition(source),
        kernel=_enum("run.kernel", KernelChoice, source.raw("run", "kernel")),
        truncation=truncation,
        output=source.raw("run", "output"),
        decoherence=decoherence,
        fit=_fit_spec(user),
    )
    logger.debug("parsed %s run configuration from %s", mode.value, source_name)
    return config


def load_config(path: PathLike) -> RunConfig:
    """Load and validate a run configuration file.

    Raises:
        OSError: If the file cannot be read.
        MissingKeyError: If ``[run] mode`` (or another key without a
            preset value) is missing.
        ValidationError: If a value is malformed or violates an invariant.
    """
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source_name=str(path))


def config_items(config: RunConfig) -> List[Tuple[str, str, str]]:
    """Every key of ``config`` as ``(section, key, text)``, in file order."""
    items: List[Tuple[str, str, str]] = [
        ("run", "mode", config.mode.value),
        ("run", "kernel", config.kernel.value),
        ("run", "output", config.output),
    ]
    for section, obj in (
        ("physics", config.physics),
        ("geometry", config.geometry),
        ("screen", config.screen),
        ("superposition", config.superposition),
    ):
        for key in SECTION_KEYS[section]:
            items.append((section, key, repr(getattr(obj, key))))
    if config.decoherence is not None:
        items.append(("decoherence", "alpha_t", repr(config.decoherence.alpha_t)))
    for key in SECTION_KEYS["numerics"]:
        items.append(("numerics", key, repr(getattr(config.truncation, key))))
    fit = config.fit
    if fit is not None:
        items.append(("fit", "free", ", ".join(fit.free_params)))
        for name in FIT_PARAMETERS:
            low, high = fit.bounds[name]
            items.append(("fit", f"{name}_min", repr(low)))
            items.append(("fit", f"{name}_max", repr(high)))
            if name in fit.initial:
                items.append(("fit", f"{name}_initial", repr(fit.initial[name])))
        items.append(("fit", "max_evaluations", repr(int(fit.max_evaluations))))
        items.append(("fit", "tolerance", repr(float(fit.tolerance))))
        items.append(("fit", "grid_points", repr(int(fit.grid_points))))
    return items


def write_config(config: RunConfig, path: PathLike) -> None:
    """Write every key of ``config``; :func:`load_config` reads it back equal."""
    parser = _parser()
    for section, key, text in config_items(config):
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, text)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        parser.write(handle)
    logger.info("wrote run configuration to %s", path)
