"""Flat-file storage for patterns, experimental series and fit reports.

Pattern files are comma-separated with the header ``s_m,intensity``; every
number is written with ``repr`` so that reading it back reproduces the
float exactly.  A trailing block of ``#`` lines records the package
version, the run configuration and the run metadata.  Nothing time
dependent is written, so identical runs give byte-identical files.

Experimental series use the header ``s_m,counts``.  Both readers go through
pandas and report malformed rows with their 1-based line number.
"""
from __future__ import annotations

import io
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import DataParseError, InvalidParameterError, ValidationError
from ..physics.calibration import ExperimentalSeries
from ..physics.intensity import Pattern
from .logger import get_logger

logger = get_logger(__name__)

PATTERN_HEADER = ("s_m", "intensity")
DATA_HEADER = ("s_m", "counts")
PathLike = Union[str, Path]


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_pattern(
    pattern: Pattern, version: str, config_items: Optional[Iterable[Tuple[str, str, str]]] = None
) -> str:
    """Render ``pattern`` as pattern-file text."""
    lines = [",".join(PATTERN_HEADER)]
    lines.extend(f"{s!r},{i!r}" for s, i in pattern.samples())
    lines.append(f"# version = {version}")
    for section, key, text in config_items or ():
        lines.append(f"# config.{section}.{key} = {text}")
    for key, value in pattern.metadata.items():
        lines.append(f"# meta.{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def write_pattern(
    pattern: Pattern,
    path: PathLike,
    version: str,
    config_items: Optional[Iterable[Tuple[str, str, str]]] = None,
) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_pattern(pattern, version, config_items))
    logger.info("wrote %d pattern samples to %s", len(pattern), path)


def _split_lines(text: str, header: Tuple[str, str]) -> Tuple[List[int], str, Dict[str, str]]:
    """Separate data rows from comments.

    Returns the 1-based file line of every data row, the CSV text handed
    to pandas (header included) and the ``key = value`` comment entries.
    """
    numbers: List[int] = []
    rows: List[str] = []
    comments: Dict[str, str] = {}
    header_seen = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                comments[key.strip()] = value.strip()
            continue
        if not header_seen:
            fields = tuple(part.strip() for part in line.split(","))
            if fields != header:
                raise DataParseError(f"expected header {','.join(header)!r}, got {line!r}", number)
            header_seen = True
            rows.append(",".join(header))
            continue
        if line.count(",") != 1:
            raise DataParseError(f"expected 2 fields, got {line.count(',') + 1}", number)
        numbers.append(number)
        rows.append(line)
    if not header_seen:
        raise DataParseError(f"missing header {','.join(header)!r}")
    return numbers, "\n".join(rows) + "\n", comments


def _read_frame(text: str, header: Tuple[str, str]) -> Tuple[pd.DataFrame, List[int], Dict[str, str]]:
    numbers, csv_text, comments = _split_lines(text, header)
    frame = pd.read_csv(io.StringIO(csv_text), dtype=str, keep_default_na=False)
    cells = pd.DataFrame({column: frame[column].str.strip() for column in header})
    values = pd.DataFrame({column: pd.to_numeric(cells[column], errors="coerce") for column in header})
    bad = ~np.isfinite(values.to_numpy(dtype=float))
    if bad.any():
        row, col = np.argwhere(bad)[0]
        column = header[col]
        raise DataParseError(f"{column}: not a finite number: {frame[column].iloc[row]!r}", numbers[row])
    # repr-written floats must read back bit for bit
    for column in header:
        frame[column] = cells[column].astype(float)
    frame["line"] = numbers
    return frame, numbers, comments


def parse_pattern(text: str) -> Pattern:
    """Parse pattern-file text; comment entries become string metadata."""
    frame, numbers, comments = _read_frame(text, PATTERN_HEADER)
    if frame.empty:
        raise DataParseError("pattern file has no samples")
    try:
        return Pattern(frame["s_m"].to_numpy(), frame["intensity"].to_numpy(), comments)
    except InvalidParameterError as exc:
        raise DataParseError(str(exc)) from None


def read_pattern(path: PathLike) -> Pattern:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_pattern(handle.read())


def parse_experimental(text: str, label: str = "") -> ExperimentalSeries:
    """Parse ``s_m,counts`` text into a sorted series, averaging duplicate positions."""
    frame, _, _ = _read_frame(text, DATA_HEADER)
    negative = frame[frame["counts"] < 0.0]
    if not negative.empty:
        row = negative.iloc[0]
        raise ValidationError("counts", f"negative value {row['counts']!r} at line {int(row['line'])}")
    merged = frame.groupby("s_m", sort=True)["counts"].mean()
    if len(merged) != len(frame):
        logger.debug("averaged %d duplicate positions", len(frame) - len(merged))
    return ExperimentalSeries(merged.index.to_numpy(dtype=float), merged.to_numpy(dtype=float), label)


def load_experimental_csv(path: PathLike) -> ExperimentalSeries:
    """Load an experimental count series from ``path``.

    Raises:
        DataParseError: On a missing header or a malformed row.
        ValidationError: On negative counts.
    """
    path = Path(path)
    series = parse_experimental(path.read_text(encoding="utf-8"), label=path.stem)
    logger.info("loaded %d experimental points from %s", len(series), path)
    return series


def write_report(report: Mapping[str, Any], path: PathLike) -> None:
    """Write a JSON report with sorted keys."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(report, handle, sort_keys=True, indent=2)
        handle.write("\n")
    logger.info("wrote report to %s", path)
