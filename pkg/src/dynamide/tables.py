"""Deterministic CSV and JSON writers."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

__all__ = ["format_value", "write_table", "read_table", "write_json"]


def format_value(x) -> str:
    """17 significant digits for floats; integers and strings as written."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def write_table(rows: Iterable[Sequence], schema: Sequence[str], path) -> Path:
    """Write ``rows`` under a header ``schema``; LF line endings, byte-stable."""
    path = Path(path)
    schema = list(schema)
    lines = [",".join(schema)]
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != len(schema):
            raise ValueError(f"row {i} has {len(row)} values; schema has {len(schema)} columns")
        lines.append(",".join(format_value(x) for x in row))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_table(path) -> tuple:
    """Header and float rows of a file produced by :func:`write_table`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    return header, rows


def write_json(obj, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
