"""Deterministic SVG phase plots.

The canvas is a fixed 800x600 viewBox. Data coordinates map linearly onto
the plot box [80, 760] x [40, 540]; the exact transform is written into a
comment so plots can be read back quantitatively.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import DegenerateGeometryError, ValidationError
from .series import FAST, PhasePolyline

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 80.0, 760.0, 40.0, 540.0
TICKS = 5


@dataclass(frozen=True)
class SvgStyle:
    fast_color: str = "#d62728"
    slow_color: str = "#1f77b4"
    fast_width: float = 2.5
    slow_width: float = 1.5
    title: str | None = None
    show_vertices: bool = False
    # extra straight lines in data coordinates, e.g. market bounds: ((x0, y0), (x1, y1))
    guides: tuple = field(default_factory=tuple)
    guide_color: str = "#ff0000"


@dataclass(frozen=True)
class AxisTransform:
    x0: float
    sx: float
    y0: float
    sy: float

    def px(self, x):
        return LEFT + (np.asarray(x, dtype=float) - self.x0) * self.sx

    def py(self, y):
        return BOTTOM - (np.asarray(y, dtype=float) - self.y0) * self.sy

    def data_x(self, px):
        return self.x0 + (np.asarray(px, dtype=float) - LEFT) / self.sx

    def data_y(self, py):
        return self.y0 + (BOTTOM - np.asarray(py, dtype=float)) / self.sy

    def comment(self) -> str:
        return (f"axis-transform: px = {LEFT:g} + (x - x0) * sx; py = {BOTTOM:g} - (y - y0) * sy; "
                f"x0={self.x0!r} sx={self.sx!r} y0={self.y0!r} sy={self.sy!r}")


def axis_transform(x, y) -> AxisTransform:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise DegenerateGeometryError("need at least 2 vertices to plot")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateGeometryError("non-finite coordinates")
    rx, ry = float(np.ptp(x)), float(np.ptp(y))
    if rx <= 0 or ry <= 0:
        raise DegenerateGeometryError("polyline has zero extent along an axis")
    return AxisTransform(float(x.min()), (RIGHT - LEFT) / rx, float(y.min()), (BOTTOM - TOP) / ry)


def _f(v) -> str:
    return f"{v:.3f}"


def _tick_label(v: float) -> str:
    text = f"{v:.4g}"
    return "0" if text == "-0" else text


def _edge_style(kind: str, style: SvgStyle) -> str:
    if kind == FAST:
        return f'stroke={quoteattr(style.fast_color)} stroke-width="{style.fast_width:g}"'
    if kind == "unstable":
        return f'stroke={quoteattr(style.slow_color)} stroke-width="{style.slow_width:g}" stroke-dasharray="5 4"'
    return f'stroke={quoteattr(style.slow_color)} stroke-width="{style.slow_width:g}"'


def render_svg(polyline, style: SvgStyle | None = None) -> str:
    """Standalone SVG with axes, 5 labelled ticks per axis, and the data.

    ``polyline`` is a :class:`PhasePolyline` or a sequence of them sharing
    one pair of axes. Consecutive edges of the same kind share one ``path``
    element with class ``data <kind>``; fast edges are drawn thicker in a
    separate colour and unstable edges dashed.
    """
    style = style or SvgStyle()
    lines = [polyline] if isinstance(polyline, PhasePolyline) else list(polyline)
    if not lines:
        raise DegenerateGeometryError("nothing to plot")
    first = lines[0]
    tr = axis_transform(np.concatenate([pl.x for pl in lines]), np.concatenate([pl.y for pl in lines]))
    title = style.title if style.title is not None else first.title

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f"<!-- {tr.comment()} -->",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:g}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>')

    out.append('<g class="axes" stroke="black" stroke-width="1" fill="none">')
    out.append(f'<line x1="{LEFT:g}" y1="{BOTTOM:g}" x2="{RIGHT:g}" y2="{BOTTOM:g}"/>')
    out.append(f'<line x1="{LEFT:g}" y1="{BOTTOM:g}" x2="{LEFT:g}" y2="{TOP:g}"/>')
    out.append("</g>")
    out.append('<g class="ticks" font-size="11" fill="black">')
    x_hi = tr.x0 + (RIGHT - LEFT) / tr.sx
    y_hi = tr.y0 + (BOTTOM - TOP) / tr.sy
    for v in np.linspace(tr.x0, x_hi, TICKS):
        x = float(tr.px(v))
        out.append(f'<line x1="{_f(x)}" y1="{BOTTOM:g}" x2="{_f(x)}" y2="{BOTTOM + 5:g}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{BOTTOM + 18:g}" text-anchor="middle">{_tick_label(v)}</text>')
    for v in np.linspace(tr.y0, y_hi, TICKS):
        y = float(tr.py(v))
        out.append(f'<line x1="{LEFT - 5:g}" y1="{_f(y)}" x2="{LEFT:g}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8:g}" y="{_f(y + 4)}" text-anchor="end">{_tick_label(v)}</text>')
    out.append("</g>")
    out.append(f'<text x="{(LEFT + RIGHT) / 2:g}" y="{HEIGHT - 12}" text-anchor="middle" font-size="13">'
               f"{escape(first.x_label)}</text>")
    out.append(f'<text x="18" y="{(TOP + BOTTOM) / 2:g}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 18 {(TOP + BOTTOM) / 2:g})">{escape(first.y_label)}</text>')

    for (x0, y0), (x1, y1) in style.guides:
        out.append(f'<line class="guide" x1="{_f(float(tr.px(x0)))}" y1="{_f(float(tr.py(y0)))}" '
                   f'x2="{_f(float(tr.px(x1)))}" y2="{_f(float(tr.py(y1)))}" '
                   f'stroke={quoteattr(style.guide_color)} stroke-dasharray="6 4"/>')

    for pl in lines:
        px, py = tr.px(pl.x), tr.py(pl.y)
        labels = pl.labels
        start = 0
        while start < len(labels):
            stop = start
            while stop + 1 < len(labels) and labels[stop + 1] == labels[start]:
                stop += 1
            kind = labels[start]
            pts = " L ".join(f"{_f(px[i])} {_f(py[i])}" for i in range(start, stop + 2))
            out.append(f'<path class="data {escape(kind)}" d="M {pts}" fill="none" '
                       f'{_edge_style(kind, style)} stroke-linejoin="round"/>')
            start = stop + 1

        if style.show_vertices:
            out.append('<g class="vertices" font-size="9" fill="#444">')
            for i in range(len(px)):
                out.append(f'<circle cx="{_f(px[i])}" cy="{_f(py[i])}" r="2"/>')
                if i < len(pl.vertex_labels):
                    out.append(f'<text x="{_f(px[i] + 4)}" y="{_f(py[i] - 4)}">{escape(pl.vertex_labels[i])}</text>')
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(text: str, destination) -> int:
    data = text.encode("utf-8")
    if hasattr(destination, "write"):
        target = getattr(destination, "buffer", destination)
        target.write(data)
        return len(data)
    try:
        Path(destination).write_bytes(data)
    except OSError as exc:
        raise ValidationError(f"cannot write {str(destination)!r}: {exc.strerror or exc}") from exc
    return len(data)


def parse_transform(svg_text: str) -> AxisTransform:
    """Recover the axis transform from a document produced by :func:`render_svg`."""
    m = re.search(r"x0=(\S+) sx=(\S+) y0=(\S+) sy=(\S+)", svg_text)
    if not m:
        raise DegenerateGeometryError("no axis-transform comment found")
    return AxisTransform(*(float(v) for v in m.groups()))


def path_points(svg_text: str) -> np.ndarray:
    """Pixel coordinates of every vertex in the document's data paths."""
    pts = []
    for d in re.findall(r'<path class="data [^"]*" d="([^"]*)"', svg_text):
        nums = [float(v) for v in re.findall(r"-?\d+(?:\.\d+)?", d)]
        pts.extend(zip(nums[0::2], nums[1::2]))
    return np.array(pts) if pts else np.empty((0, 2))


