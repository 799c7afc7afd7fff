"""Deterministic CSV and report I/O.

Floats are written as scientific notation with 17 significant digits so
doubles round-trip losslessly; files are written to a temporary name in the
target directory and renamed into place, so a failed command never leaves a
partial artifact.  Line endings are fixed to "\n" for byte-reproducibility.
"""

from __future__ import annotations

import os
import tempfile
from typing import Iterable, Sequence


class CsvFormatError(ValueError):
    """Malformed input CSV; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def format_float(x: float) -> str:
    return f"{float(x):.16e}"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Write rows of floats (or pre-formatted strings) atomically."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else format_float(cell)
                              for cell in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def write_report(path: str, entries: Sequence[tuple[str, object]]) -> str:
    """Write a key = value report atomically; floats get full precision."""
    lines = []
    for key, value in entries:
        if isinstance(value, float):
            value = format_float(value)
        lines.append(f"{key} = {value}")
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def read_csv_columns(path: str, required: Sequence[str]) -> dict[str, list[float]]:
    """Read named float columns; any malformation reports its line number."""
    try:
        with open(path, "r", newline="") as handle:
            raw = handle.read()
    except OSError as exc:
        raise CsvFormatError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in raw.split("\n") if ln.strip() != ""]
    if not lines:
        raise CsvFormatError("empty file", line=1)
    header = [h.strip() for h in lines[0].split(",")]
    for name in required:
        if name not in header:
            raise CsvFormatError(f"missing required column {name!r} "
                                 f"(found {header})", line=1)
    index = {name: header.index(name) for name in required}
    columns: dict[str, list[float]] = {name: [] for name in required}
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise CsvFormatError(f"expected {len(header)} cells, got {len(cells)}",
                                 line=lineno)
        for name, col in index.items():
            try:
                columns[name].append(float(cells[col]))
            except ValueError:
                raise CsvFormatError(f"cell {cells[col]!r} in column {name!r} "
                                     "is not a number", line=lineno) from None
    if not columns[required[0]]:
        raise CsvFormatError("no data rows", line=1)
    return columns
