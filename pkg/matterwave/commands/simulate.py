"""``single`` and ``double`` commands: compute a pattern and write it to a pattern file."""
from __future__ import annotations

import argparse
from dataclasses import replace
from typing import Any

from .. import __version__
from ..config import Mode, RunConfig, config_items, load_config, parse_config
from ..errors import ValidationError
from ..physics.core import derive_kinematics
from ..physics.intensity import (
    Pattern,
    intensity_double_coherent,
    intensity_double_decoherent,
    intensity_single,
)
from ..physics.propagation import KernelChoice
from ..utils.logger import get_logger
from ..utils.storage import write_pattern

logger = get_logger(__name__)


def simulate(config: RunConfig) -> Pattern:
    """Compute the pattern that ``config`` describes."""
    kin = derive_kinematics(config.physics)
    scan = config.screen.geometry()
    amplitude = config.physics.amplitude
    args = (config.kernel, config.truncation, kin, config.geometry, amplitude)
    if config.mode is Mode.SINGLE:
        return intensity_single(scan, *args)
    if config.mode is Mode.DOUBLE_COHERENT:
        return intensity_double_coherent(scan, config.superposition, *args)
    return intensity_double_decoherent(scan, config.superposition, config.decoherence, *args)


def _resolve_config(args: argparse.Namespace, default_mode: Mode) -> RunConfig:
    if args.config:
        config = load_config(args.config)
    else:
        config = parse_config(f"[run]\nmode = {default_mode.value}\n", source_name="defaults")
    if config.mode.double != default_mode.double:
        raise ValidationError("run.mode", f"{config.mode.value!r} cannot be run by the {args.command!r} command")
    if args.kernel:
        config = replace(config, kernel=KernelChoice(args.kernel))
    if args.out:
        config = replace(config, output=args.out)
    return config


def _run(args: argparse.Namespace, default_mode: Mode) -> int:
    config = _resolve_config(args, default_mode)
    logger.info("running %s with the %s kernel", config.mode.value, config.kernel.value)
    pattern = simulate(config)
    write_pattern(pattern, config.output, __version__, config_items(config))
    print(config.output)
    return 0


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Run configuration file (INI); presets fill omitted keys.")
    parser.add_argument("--out", help="Pattern file to write (overrides [run] output).")
    parser.add_argument(
        "--kernel",
        choices=[k.value for k in KernelChoice],
        help="Propagation prefactor (overrides [run] kernel).",
    )


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    single = subparsers.add_parser("single", parents=[common], help="Single-slit pattern.")
    _add_common_options(single)
    single.set_defaults(handler=lambda args: _run(args, Mode.SINGLE))

    double = subparsers.add_parser(
        "double", parents=[common], help="Double-slit pattern, coherent or environment-damped."
    )
    _add_common_options(double)
    double.set_defaults(handler=lambda args: _run(args, Mode.DOUBLE_COHERENT))
