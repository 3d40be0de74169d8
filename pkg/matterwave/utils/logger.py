"""Logging utilities for matterwave.

This module configures a root logger that writes to the console and
optionally to a file.  ANSI color codes are used for console output to
improve readability.  Console output goes to stderr so that command
results printed on stdout can be piped.  Log messages include timestamps,
log levels, module names, and the message body.
"""
import logging
import os
import sys
from logging import Logger
from typing import Union

# ANSI escape codes for colored console output
ANSI_RESET = "\033[0m"
ANSI_COLORS = {
    logging.DEBUG: "\033[90m",    # Bright black
    logging.INFO: "\033[92m",     # Bright green
    logging.WARNING: "\033[93m",  # Bright yellow
    logging.ERROR: "\033[91m",    # Bright red
    logging.CRITICAL: "\033[95m", # Bright magenta
}

LOG_FORMAT = "[%(asctime)s] [%(levelname)s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class ColorFormatter(logging.Formatter):
    """Custom formatter that applies ANSI colors to log levels."""

    def format(self, record: logging.LogRecord) -> str:
        color = ANSI_COLORS.get(record.levelno, "")
        message = super().format(record)
        return f"{color}{message}{ANSI_RESET}"


def resolve_level(level: Union[int, str]) -> int:
    """Translate a level name such as ``"debug"`` into a logging constant.

    Unknown names fall back to ``logging.INFO``.
    """
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).strip().upper())
    return value if isinstance(value, int) else logging.INFO


def setup_logging(log_file: str, level: Union[int, str] = logging.INFO) -> Logger:
    """Configure the root logger with console and file handlers.

    If the logger is already configured (e.g., by another call), only the
    level is updated and the existing handlers are kept.

    Args:
        log_file: Path to the log file.  If falsy, file logging is disabled.
        level: The logging level (constant or name) for the root logger.

    Returns:
        The configured root logger.
    """
    logger = logging.getLogger()
    logger.setLevel(resolve_level(level))
    if logger.handlers:
        # Already configured by a previous call
        return logger

    # Console handler with color formatting
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(ColorFormatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(console_handler)

    # File handler (no color) if path provided
    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> Logger:
    """Get a named logger configured with the root logger's handlers.

    Args:
        name: The logger name.

    Returns:
        A logger instance with the given name.
    """
    return logging.getLogger(name)
