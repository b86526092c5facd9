"""Reading and validating the CSV files written by dopo-lab.

Files start with ``#`` comment lines (``# params: key=value ...`` and
optionally ``# axis: name``), then a header row, then data rows.  Numeric
cells are plain floats or the literal ``nan``; empty cells stay text.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SchemaError

SWEEP_COLUMNS = (
    "sigma", "method", "branch", "pump_intensity", "signal_intensity",
    "var_x", "var_y", "signal_photons_norm", "error",
)
MARGINAL_COLUMNS = ("x", "exact", "gauss_below", "gauss_above")


@dataclass(frozen=True)
class Table:
    """One parsed CSV file."""

    path: str
    comments: tuple[str, ...]
    names: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]

    def require(self, columns: Sequence[str]) -> None:
        missing = [c for c in columns if c not in self.names]
        if missing:
            raise SchemaError(
                f"{self.path}: missing required column(s) {', '.join(missing)}"
            )
        if not self.cells:
            raise SchemaError(f"{self.path}: no data rows")

    def text(self, name: str) -> list[str]:
        idx = self.names.index(name)
        return [row[idx] for row in self.cells]

    def column(self, name: str) -> np.ndarray:
        values = []
        for cell in self.text(name):
            try:
                values.append(float(cell))
            except ValueError:
                values.append(float("nan"))
        return np.array(values)

    def comment_value(self, key: str) -> str | None:
        """Value of a ``# key: value`` comment line, if present."""
        prefix = f"# {key}:"
        for line in self.comments:
            if line.startswith(prefix):
                return line[len(prefix):].strip()
        return None

    def params(self) -> dict[str, str]:
        """key=value pairs of the ``# params:`` comment."""
        raw = self.comment_value("params") or ""
        out = {}
        for token in raw.split():
            if "=" in token:
                key, _, value = token.partition("=")
                out[key] = value
        return out

    def drive_value(self) -> float:
        try:
            return float(self.params()["sigma"])
        except (KeyError, ValueError):
            raise SchemaError(
                f"{self.path}: params comment lacks a numeric sigma"
            ) from None


def read_table(path: str) -> Table:
    comments: list[str] = []
    data_lines: list[str] = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line.rstrip("\n"))
            else:
                data_lines.append(line)
    names: tuple[str, ...] | None = None
    cells: list[tuple[str, ...]] = []
    for record in csv.reader(data_lines):
        if not record:
            continue
        if names is None:
            names = tuple(record)
        elif len(record) != len(names):
            raise SchemaError(
                f"{path}: row with {len(record)} cells, header has {len(names)}"
            )
        else:
            cells.append(tuple(record))
    if names is None:
        raise SchemaError(f"{path}: empty file, no header row")
    return Table(
        path=path, comments=tuple(comments), names=names, cells=tuple(cells)
    )
