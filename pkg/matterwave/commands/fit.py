"""``fit`` command: calibrate a run configuration against measured counts.

Writes the JSON report to ``--out`` and the fitted-model pattern next to
it with a ``.csv`` suffix.
"""
from __future__ import annotations

import argparse
from typing import Any

from .. import __version__
from ..config import config_items, load_config
from ..physics.calibration import FitSpec, fit
from ..utils.helpers import sibling_path
from ..utils.logger import get_logger
from ..utils.storage import load_experimental_csv, write_pattern, write_report

logger = get_logger(__name__)


def _run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    data = load_experimental_csv(args.data)
    spec = config.fit if config.fit is not None else FitSpec(free_params=("A",))
    result = fit(config, data, spec)

    report = result.as_report()
    report.update(mode=config.mode.value, data=data.label, points=len(data), version=__version__)
    write_report(report, args.out)
    pattern_path = sibling_path(args.out, ".csv")
    write_pattern(result.pattern, pattern_path, __version__, config_items(config))
    print(f"objective {result.objective!r} converged {str(result.converged).lower()}")
    return 0


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("fit", parents=[common], help="Fit A, c1 and lambda_t to measured counts.")
    parser.add_argument("--config", required=True, help="Run configuration; [fit] selects free parameters.")
    parser.add_argument("--data", required=True, help="Experimental CSV with header s_m,counts.")
    parser.add_argument("--out", default="fit.json", help="JSON report path (default: fit.json).")
    parser.set_defaults(handler=_run)
