"""CSV emission and parsing for result tables.

Numbers are written as the shortest decimal that round-trips (``repr`` of a
float), records end with LF, and a header line is always present.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .integrator import Trajectory
from .model import NE, NS

_INT_RE = re.compile(r"^[+-]?\d+$")


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def parse_value(text: str):
    if text == "":
        return None
    if _INT_RE.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def trajectory_rows(traj: Trajectory) -> tuple[list[dict], list[str]]:
    slow = {NS: "s", NE: "e"}.get(traj.chart, "y1")
    columns = ["t", "n", slow]
    rows = [{"t": t, "n": y[0], slow: y[1]} for t, y in zip(traj.times.tolist(), traj.states.tolist())]
    return rows, columns


def to_csv_text(table, columns=None) -> str:
    """Render a list of dicts, or a Trajectory, as CSV text."""
    if isinstance(table, Trajectory):
        table, default_cols = trajectory_rows(table)
        columns = columns or default_cols
    rows = list(table)
    if columns is None:
        columns = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def write_csv(table, destination, columns=None) -> int:
    """Write ``table`` to a path or binary/text stream; returns the byte count."""
    data = to_csv_text(table, columns).encode("utf-8")
    if hasattr(destination, "write"):
        target = getattr(destination, "buffer", destination)
        try:
            target.write(data)
        except TypeError:
            target.write(data.decode("utf-8"))
        return len(data)
    path = Path(destination)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise ValidationError(f"cannot write {os.fspath(path)!r}: {exc.strerror or exc}") from exc
    return len(data)


def read_csv_table(source) -> list[dict]:
    """Parse a CSV written by :func:`write_csv` back into typed rows."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read {os.fspath(source)!r}: {exc.strerror or exc}") from exc
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty CSV: missing header") from None
    return [{k: parse_value(v) for k, v in zip(header, rec)} for rec in reader if rec]


def values_equal(a, b) -> bool:
    """Equality treating NaN as equal to NaN, for round-trip checks."""
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b
