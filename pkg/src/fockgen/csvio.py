"""Deterministic CSV output.

Every file starts with a metadata row (config hash, units convention),
then a column-header row, then data formatted with 17 significant digits
and '.' decimal separator, RFC-4180 style.  Identical configs produce
byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

__all__ = ["write_csv", "format_value"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path, meta_cells, header, rows):
    """Write rows (iterables of cells) under a metadata row and a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(meta_cells)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path
