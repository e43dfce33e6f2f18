"""Plain-text series input and output."""
from __future__ import annotations

import sys
from typing import Optional

import numpy as np


class DataError(ValueError):
    """Malformed or empty series file."""


def read_series(path) -> np.ndarray:
    """Read one value per line; a non-numeric first line is taken as header.

    Blank lines are ignored.  Multi-column rows and non-numeric values past
    the header raise :class:`DataError` with the offending line number.
    """
    values = []
    first = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if "," in line.rstrip(","):
                raise DataError(f"{path}:{lineno}: expected a single column")
            line = line.rstrip(",")
            try:
                v = float(line)
            except ValueError:
                if first:
                    first = False
                    continue
                raise DataError(f"{path}:{lineno}: not a number: {line!r}") from None
            first = False
            if not np.isfinite(v):
                raise DataError(f"{path}:{lineno}: non-finite value")
            values.append(v)
    if not values:
        raise DataError(f"{path}: no data")
    return np.array(values)


def format_series(y, header: Optional[str] = None) -> str:
    lines = [header] if header else []
    lines.extend(repr(float(v)) for v in np.asarray(y, dtype=float))
    return "\n".join(lines) + "\n"


def write_series(path, y, header: Optional[str] = None) -> None:
    """Write one value per line with round-trip (``repr``) precision."""
    text = format_series(y, header)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
