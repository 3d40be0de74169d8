"""``visibility`` command: print the central fringe visibility of a pattern file."""
from __future__ import annotations

import argparse
from typing import Any

from ..physics.intensity import fringe_visibility, visibility_at_period
from ..utils.helpers import format_visibility
from ..utils.logger import get_logger
from ..utils.storage import read_pattern

logger = get_logger(__name__)


def _run(args: argparse.Namespace) -> int:
    pattern = read_pattern(args.pattern)
    if args.period is not None:
        value = visibility_at_period(pattern, args.period, args.center)
    else:
        value = fringe_visibility(pattern)
    logger.debug("visibility of %s: %r", args.pattern, value)
    print(format_visibility(value))
    return 0


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("visibility", parents=[common], help="Central fringe visibility.")
    parser.add_argument("--pattern", required=True, help="Pattern file with header s_m,intensity.")
    parser.add_argument(
        "--period",
        type=float,
        help="Compare I(center) with I(center +- period/2) instead of locating extrema.",
    )
    parser.add_argument("--center", type=float, default=0.0, help="Probe centre for --period (m).")
    parser.set_defaults(handler=_run)
