"""Miscellaneous helpers shared by the command modules."""
from __future__ import annotations

from pathlib import Path
from typing import Union

PathLike = Union[str, Path]


def sibling_path(path: PathLike, suffix: str) -> Path:
    """Return ``path`` with its suffix replaced, e.g. ``fit.json`` -> ``fit.csv``.

    Example::

        sibling_path("out/fit.json", ".csv")  # => Path("out/fit.csv")
    """
    return Path(path).with_suffix(suffix)


def format_visibility(value: float) -> str:
    """Format a visibility the way the ``visibility`` command prints it."""
    return f"{value:.6f}"
