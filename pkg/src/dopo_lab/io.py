"""Deterministic text serialization.

All numeric output goes through one formatter (12 significant digits,
scientific notation) so that repeated runs with identical arguments are
byte-identical.  CSV files start with comment lines recording the
parameters that produced them.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import sys
from contextlib import contextmanager
from importlib import metadata
from typing import Iterable, Iterator, Sequence


def tool_version() -> str:
    try:
        return metadata.version("dopo-lab")
    except metadata.PackageNotFoundError:
        return "unknown"


def format_value(value) -> str:
    """Render one cell: floats at 12 significant digits, rest as str."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.11e}"
    return str(value)


def params_comment(sigma: float | str, kappa: float, g: float, method: str) -> str:
    sigma_text = sigma if isinstance(sigma, str) else format_value(float(sigma))
    return (
        f"# params: sigma={sigma_text} "
        f"kappa={format_value(float(kappa))} g={format_value(float(g))} "
        f"method={method} version={tool_version()}"
    )


@contextmanager
def open_output(path: str | None) -> Iterator[_io.TextIOBase]:
    """Writable text stream: the given path, or stdout for None or '-'."""
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def write_table(
    stream,
    comments: Sequence[str],
    names: Sequence[str],
    rows: Iterable[Sequence],
) -> None:
    for line in comments:
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([format_value(v) for v in row])


def _round_floats(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        return float(f"{obj:.11e}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(stream, record: dict) -> None:
    json.dump(_round_floats(record), stream, indent=2, sort_keys=True)
    stream.write("\n")
