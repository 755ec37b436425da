"""Historical production/price series and annotated phase polylines."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateGeometryError, ValidationError

SERIES_HEADER = ("year", "production", "price")
FAST = "fast"
SLOW = "slow"


class SeriesFormatError(ValidationError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class SeriesRow:
    year: int
    production: float
    price: float


@dataclass
class PhasePolyline:
    """Vertices ``(x, y)`` with one speed and one fast/slow label per edge."""

    x: np.ndarray
    y: np.ndarray
    speeds: np.ndarray
    labels: list[str]
    x_label: str = "x"
    y_label: str = "y"
    title: str = ""
    vertex_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.speeds = np.asarray(self.speeds, dtype=float)
        if len(self.x) != len(self.y):
            raise ValidationError("x and y must have equal length")
        if len(self.labels) != max(len(self.x) - 1, 0) or len(self.speeds) != len(self.labels):
            raise ValidationError("need exactly one speed and one label per edge")

    @property
    def edge_count(self) -> int:
        return len(self.labels)

    def rows(self) -> list[dict]:
        out = []
        for i in range(len(self.x)):
            out.append({
                "x": float(self.x[i]),
                "y": float(self.y[i]),
                "edge_speed": float(self.speeds[i]) if i < self.edge_count else None,
                "edge_label": self.labels[i] if i < self.edge_count else None,
            })
        return out


def read_series_csv(source) -> list[SeriesRow]:
    """Parse and validate a ``year,production,price`` CSV file or stream."""
    if hasattr(source, "read"):
        text = source.read()
        name = getattr(source, "name", "<stream>")
    else:
        name = os.fspath(source)
        try:
            text = Path(source).read_bytes().decode("utf-8-sig")
        except FileNotFoundError:
            raise SeriesFormatError(f"no such file: {name!r}") from None
        except (OSError, UnicodeDecodeError) as exc:
            raise SeriesFormatError(f"cannot read {name!r}: {exc}") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    lines = [(i, rec) for i, rec in enumerate(reader, start=1) if any(c.strip() for c in rec)]
    if not lines:
        raise SeriesFormatError(f"{name}: empty file")
    first_line, header = lines[0]
    if tuple(c.strip() for c in header) != SERIES_HEADER:
        raise SeriesFormatError(f"header must be {','.join(SERIES_HEADER)}, got {','.join(header)}", first_line)
    if len(lines) == 1:
        raise SeriesFormatError(f"{name}: no data rows")
    rows = []
    for line, rec in lines[1:]:
        if len(rec) != 3:
            raise SeriesFormatError(f"expected 3 fields, got {len(rec)}", line)
        try:
            year = int(rec[0].strip())
        except ValueError:
            raise SeriesFormatError(f"year must be an integer, got {rec[0]!r}", line) from None
        values = []
        for col, raw in zip(SERIES_HEADER[1:], rec[1:]):
            try:
                v = float(raw.strip())
            except ValueError:
                raise SeriesFormatError(f"{col} is not a number: {raw!r}", line) from None
            if not (math.isfinite(v) and v > 0):
                raise SeriesFormatError(f"{col} must be positive and finite, got {raw.strip()}", line)
            values.append(v)
        if rows and year <= rows[-1].year:
            raise SeriesFormatError(f"years must increase, {year} follows {rows[-1].year}", line)
        rows.append(SeriesRow(year, values[0], values[1]))
    return rows


def label_edges(x, y, theta: float, dt=None):
    """Per-edge normalised speeds and fast/slow labels.

    Both coordinates are scaled by their full range. An edge is fast when
    its scaled |dy| exceeds ``theta`` times its scaled |dx|. A coordinate
    with zero range contributes zero displacement; both zero is an error.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise ValidationError("need at least 2 points")
    if not theta > 0:
        raise ValidationError(f"theta must be > 0, got {theta!r}")
    rx, ry = np.ptp(x), np.ptp(y)
    if rx == 0 and ry == 0:
        raise DegenerateGeometryError("all points coincide")
    dx = np.diff(x) / rx if rx > 0 else np.zeros(len(x) - 1)
    dy = np.diff(y) / ry if ry > 0 else np.zeros(len(y) - 1)
    dt = np.ones(len(dx)) if dt is None else np.asarray(dt, dtype=float)
    speeds = np.hypot(dx, dy) / dt
    labels = [FAST if abs(b) > theta * abs(a) else SLOW for a, b in zip(dx, dy)]
    return speeds, labels


def phase_polyline(rows: list[SeriesRow], theta: float = 2.0) -> PhasePolyline:
    """Production (x) against price (y), edges labelled by the fast/slow rule."""
    if len(rows) < 2:
        raise ValidationError("phase_polyline needs at least 2 rows")
    x = [r.production for r in rows]
    y = [r.price for r in rows]
    dt = np.diff([r.year for r in rows]).astype(float)
    speeds, labels = label_edges(x, y, theta, dt)
    return PhasePolyline(x, y, speeds, labels, x_label="production", y_label="price",
                         vertex_labels=[str(r.year) for r in rows])


def orbit_polyline(cycle, segments) -> PhasePolyline:
    """EROEI (x) against price (y) for a limit cycle, labelled by its segments."""
    m = len(cycle.orbit) - 1
    kinds = [SLOW] * m
    for seg in segments:
        for i in seg.indices(m):
            kinds[i] = seg.kind
    x, y = cycle.e, cycle.n
    dt = np.diff(cycle.times)
    speeds = np.hypot(np.diff(x) / np.ptp(x), np.diff(y) / np.ptp(y)) / dt
    return PhasePolyline(x, y, speeds, kinds, x_label="EROEI", y_label="price")


def trajectory_polyline(traj, theta: float = 10.0) -> PhasePolyline:
    """Slow variable (x) against n (y) for a simulated trajectory."""
    x, y = traj.states[:, 1], traj.states[:, 0]
    speeds, labels = label_edges(x, y, theta, np.diff(traj.times))
    x_label = {"ns": "S (1/EROEI)", "ne": "EROEI"}.get(traj.chart, "slow")
    return PhasePolyline(x, y, speeds, labels, x_label=x_label, y_label="N (price)")


def toy_polyline(steps) -> PhasePolyline:
    x = [s.demand for s in steps]
    y = [s.price for s in steps]
    speeds, _ = label_edges(x, y, 1.0)
    labels = [s.kind for s in steps[1:]]
    return PhasePolyline(x, y, speeds, labels, x_label="consumption", y_label="price")


def diagram_polylines(rows) -> list[PhasePolyline]:
    """Low, middle and high equilibrium branches from branch-diagram rows.

    Single roots below the bistable window belong to the low branch, those
    above it to the high branch. The trivial n = 0 rows are skipped.
    """
    by_s: dict[float, list[tuple[float, str]]] = {}
    for row in rows:
        if row["n"] is None or row["n"] == 0.0:
            continue
        by_s.setdefault(row["s"], []).append((row["n"], row["stability"]))
    grid = sorted(by_s)
    triple = [s for s in grid if len(by_s[s]) == 3]
    low, mid, high = [], [], []
    for s in grid:
        roots = sorted(by_s[s])
        if len(roots) == 3:
            low.append((s, roots[0][0]))
            mid.append((s, roots[1][0]))
            high.append((s, roots[2][0]))
        elif not triple or s < triple[0]:
            low.append((s, roots[0][0]))
        else:
            high.append((s, roots[-1][0]))
    out = []
    for pts, kind in ((low, "stable"), (mid, "unstable"), (high, "stable")):
        if len(pts) < 2:
            continue
        xs, ys = zip(*pts)
        out.append(PhasePolyline(xs, ys, np.zeros(len(xs) - 1), [kind] * (len(xs) - 1),
                                 x_label="S (foliage, 1/EROEI)", y_label="N (equilibrium price)"))
    return out
