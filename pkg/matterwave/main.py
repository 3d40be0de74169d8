"""
Entry point for the matterwave command line.

This module builds the ``argparse`` parser, registers the command modules,
sets up logging from ``Settings`` and dispatches to the selected command.
Errors raised by the library are turned into exit statuses:

* 0 success
* 2 usage error (reported by ``argparse``)
* 3 invalid configuration, parameters, data or unreadable files
* 4 numerical convergence failure
"""
from __future__ import annotations

import argparse
import importlib
import sys
from typing import Any, List, Optional

from .config import Settings
from .errors import ConvergenceError, MatterwaveError
from .utils.logger import get_logger, setup_logging

EXIT_OK = 0
EXIT_VALIDATION = 3
EXIT_CONVERGENCE = 4

COMMAND_MODULES = ["simulate", "fit", "visibility", "oracle"]


def _register_all_commands(subparsers: Any, common: argparse.ArgumentParser) -> None:
    """Import and register all command modules.

    Each command module defines a ``register`` function that adds its
    subcommands.  Import errors propagate.
    """
    logger = get_logger(__name__)
    for mod_name in COMMAND_MODULES:
        module = importlib.import_module(f"matterwave.commands.{mod_name}")
        module.register(subparsers, common)
        logger.debug("Registered commands from matterwave.commands.%s", mod_name)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        type=str.upper,
        help="Override MATTERWAVE_LOG_LEVEL for this run.",
    )
    parser = argparse.ArgumentParser(
        prog="matterwave",
        description="Matter-wave single- and double-slit diffraction simulator.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    _register_all_commands(subparsers, common)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit status."""
    settings = Settings.load()
    args = build_parser().parse_args(argv)
    logger = setup_logging(settings.log_file, args.log_level or settings.log_level)
    try:
        return args.handler(args)
    except ConvergenceError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (MatterwaveError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
