"""``oracle-check`` command: closed-form aperture integrals against quadrature."""
from __future__ import annotations

import argparse
from typing import Any

from ..physics.propagation import run_oracle_suite
from ..utils.logger import get_logger

logger = get_logger(__name__)

ACCEPTED_ERROR = 1e-9


def _run(args: argparse.Namespace) -> int:
    report = run_oracle_suite(cases=args.cases, seed=args.seed)
    print(f"max relative error {report.max_relative_error:.3e} over {report.cases} cases")
    if report.max_relative_error >= ACCEPTED_ERROR:
        logger.error(
            "closed form disagrees with quadrature at q=%r mode=%d extent=%r",
            report.worst_q, report.worst_mode, report.worst_extent,
        )
        return 4
    return 0


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "oracle-check", parents=[common], help="Check the closed-form aperture integral."
    )
    parser.add_argument("--cases", type=int, default=1000, help="Number of random cases (default 1000).")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default 0).")
    parser.set_defaults(handler=_run)
