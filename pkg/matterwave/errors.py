"""Exception hierarchy for the matterwave package.

Every error raised on purpose by the library derives from
``MatterwaveError`` so the command line layer can map it to an exit code.
Parameter and domain errors also subclass ``ValueError`` and convergence
errors subclass ``RuntimeError``, which keeps ``except ValueError`` style
callers working.
"""
from __future__ import annotations

from typing import Optional


class MatterwaveError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(MatterwaveError, ValueError):
    """A physical or numerical parameter violates its invariant."""


class DomainError(MatterwaveError, ValueError):
    """An evaluation point or argument lies outside the valid domain."""


class ConvergenceError(MatterwaveError, RuntimeError):
    """A numerical procedure did not converge within its budget."""


class AnalysisError(MatterwaveError):
    """A pattern does not contain the features an analysis needs."""


class ConfigError(MatterwaveError):
    """Base class for configuration problems."""


class MissingKeyError(ConfigError):
    """A required configuration key is absent."""

    def __init__(self, key: str) -> None:
        super().__init__(f"Missing required configuration key: {key}")
        self.key = key


class ValidationError(ConfigError):
    """A configuration value is present but invalid."""

    def __init__(self, key_path: str, reason: str) -> None:
        super().__init__(f"Invalid value for {key_path}: {reason}")
        self.key_path = key_path
        self.reason = reason


class DataParseError(MatterwaveError):
    """A data file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
