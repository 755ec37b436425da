"""Limit cycle of the full two-variable system.

The cycle is located with a Poincare section on the fast variable: upward
crossings of ``n = level``, where ``level`` is the geometric mean of the n
extrema. During the transient the level follows the extrema of the current
integration chunk; afterwards it is frozen at the value measured over the
last transient loop, and successive crossing states are compared until they
agree to ``tol`` in range-normalised coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CycleBudgetError, DegenerateGeometryError, FixedPointError, ValidationError
from .integrator import IntegratorSettings, Trajectory, hermite, integrate, sample_at
from .model import NE, NS, ModelParams, StateNE, vector_field

ORBIT_SAMPLES = 2048
DEFAULT_THETA = 10.0
DEFAULT_MIN_LEN = 16
DEFAULT_TRANSIENT = 10
FAST = "fast"
SLOW = "slow"
CLOCKWISE = "clockwise"
COUNTERCLOCKWISE = "counterclockwise"


@dataclass
class LimitCycle:
    """One period of the cycle in the (n, e) chart.

    ``orbit[:, 0]`` is the price n and ``orbit[:, 1]`` the EROEI e, sampled
    at the uniform ``times`` (starting at 0). First and last samples are
    successive section crossings.
    """

    orbit: np.ndarray
    times: np.ndarray
    period: float
    residual: float
    params: ModelParams | None = None
    section_level: float = math.nan
    crossings: int = 0

    def __post_init__(self):
        if self.orbit.ndim != 2 or self.orbit.shape[1] != 2 or len(self.orbit) < 3:
            raise ValidationError("orbit must be an (m, 2) array with m >= 3")
        if not self.period > 0:
            raise ValidationError("period must be > 0")

    @property
    def n(self) -> np.ndarray:
        return self.orbit[:, 0]

    @property
    def e(self) -> np.ndarray:
        return self.orbit[:, 1]


@dataclass(frozen=True)
class PhaseSegment:
    """A run of samples of one kind; indices are cyclic, ``stop`` exclusive."""

    kind: str
    start: int
    stop: int
    length: int
    speed_ratio: float

    def indices(self, m: int) -> np.ndarray:
        return (self.start + np.arange(self.length)) % m


def _crossings(traj: Trajectory, level: float, t_from: float):
    """Upward crossings of n = level after ``t_from``, as (t, state) pairs."""
    n = traj.states[:, 0]
    idx = np.nonzero((n[:-1] < level) & (n[1:] >= level))[0]
    out = []
    for i in idx:
        ta, tb = traj.times[i], traj.times[i + 1]
        if tb <= t_from:
            continue
        ya, yb = traj.states[i], traj.states[i + 1]
        fa, fb = traj.derivs[i], traj.derivs[i + 1]
        lo, hi = ta, tb
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if hermite(mid, ta, tb, ya[0], yb[0], fa[0], fb[0]) < level:
                lo = mid
            else:
                hi = mid
        t_c = 0.5 * (lo + hi)
        if t_c <= t_from:
            continue
        y_c = hermite(t_c, ta, tb, ya, yb, fa, fb)
        out.append((float(t_c), (float(level), float(y_c[1]))))
    return out


def _relative_diameter(states: np.ndarray) -> float:
    scale = np.maximum(np.abs(states).max(axis=0), 1e-300)
    return float(np.hypot(*(np.ptp(states, axis=0) / scale)))


def _loop_extrema(traj: Trajectory, ta: float, tb: float) -> tuple[float, float]:
    """Extrema of n over [ta, tb], refined by dense output around the extreme nodes."""
    sel = np.nonzero((traj.times >= ta) & (traj.times <= tb))[0]
    n = traj.states[sel, 0]
    out = []
    for i in (sel[int(np.argmin(n))], sel[int(np.argmax(n))]):
        lo = max(i - 1, 0)
        hi = min(i + 1, len(traj.times) - 1)
        tq = np.linspace(max(traj.times[lo], ta), min(traj.times[hi], tb), 513)
        out.append(sample_at(traj, tq)[:, 0])
    return float(out[0].min()), float(out[1].max())


def _to_ne(states: np.ndarray, chart: str) -> np.ndarray:
    if chart == NE:
        return states
    return np.column_stack([states[:, 0], 1.0 / states[:, 1]])


def _normalised_distance(a, b, ranges):
    d = [(a[i] - b[i]) / ranges[i] if ranges[i] > 0 else 0.0 for i in range(2)]
    return math.hypot(*d)


def find_limit_cycle(params: ModelParams, y0: StateNE, settings: IntegratorSettings | None = None,
                     max_periods: int = 200, *, chart: str = NE, tol: float = 1e-6,
                     transient: int = DEFAULT_TRANSIENT, chunk: float | None = None,
                     samples: int = ORBIT_SAMPLES, level: float | None = None) -> LimitCycle:
    """Integrate until the section return map converges and return one period.

    ``max_periods`` bounds the total number of section crossings, transient
    included. ``chart`` selects the coordinates used for integration; the
    orbit is always reported in the (n, e) chart. Passing ``level`` fixes
    the section instead of deriving it from the transient.
    """
    level_override = level
    if params.has_drift:
        raise ValidationError("limit cycles are only defined with b_drift = smax_drift = 0")
    if max_periods < 1 or transient < 1:
        raise ValidationError("max_periods and transient must be >= 1")
    settings = settings or IntegratorSettings()
    field = vector_field(params, chart)
    y = (y0.n, y0.e) if chart == NE else (y0.n, 1.0 / y0.e)
    t = y0.t
    chunk = chunk or 20.0 / min(params.r, params.rho)

    # integration noise around a stable point scales with rel_tol
    fixed_point_tol = max(1e-8, 10 * settings.rel_tol)
    parts: list[Trajectory] = []
    state = {"t": t, "y": y, "h": settings.h_init, "idle": 0}

    def advance():
        h = min(max(state["h"], settings.h_min), settings.h_max)
        part = integrate(field, state["y"], (state["t"], state["t"] + chunk), replace(settings, h_init=h), chart=chart)
        if _relative_diameter(part.states) < fixed_point_tol:
            y_end = part.final
            raise FixedPointError(f"trajectory converged to an equilibrium near n={y_end[0]!r}, slow={y_end[1]!r}")
        state.update(t=part.t1, y=part.final, h=part.h_next if math.isfinite(part.h_next) else settings.h_init)
        parts.append(part)
        return part

    def count(found):
        state["idle"] = 0 if found else state["idle"] + 1
        if state["idle"] > max_periods:
            raise CycleBudgetError(f"no section crossings in {state['idle']} integration chunks")

    used = 0

    def spend():
        nonlocal used
        used += 1
        if used > max_periods:
            raise CycleBudgetError(
                f"no convergence within {max_periods} section crossings (last residual {last_residual:.3g})")

    last_residual = math.inf
    # transient: level tracks the extrema of the latest chunk
    times: list[float] = []
    while len(times) <= transient:
        part = advance()
        n = part.states[:, 0]
        level = math.sqrt(max(float(n.min()), 1e-300) * float(n.max()))
        found = _crossings(part, level, times[-1] if times else -math.inf)
        count(found)
        for t_c, _ in found:
            spend()
            times.append(t_c)
        if len(times) >= 2:
            parts[:] = [p for p in parts if p.t1 >= times[-2]]
    if level_override is None:
        recent = Trajectory.concat(parts)
        n_lo, n_hi = _loop_extrema(recent, times[-2], times[-1])
        level = math.sqrt(n_lo * n_hi)
    else:
        level = float(level_override)

    # stationary: fixed section, compare successive returns
    t_scan = times[-2]
    previous = None
    while True:
        recent = Trajectory.concat(parts)
        found = _crossings(recent, level, t_scan)
        count(found)
        for t_c, _ in found:
            spend()
            t_scan = t_c
            if previous is not None:
                cyc = _resample(recent, previous, t_c, chart, samples)
                last_residual = _normalised_distance(cyc[0], cyc[-1], np.ptp(cyc, axis=0))
                if last_residual < tol:
                    return LimitCycle(orbit=cyc, times=np.linspace(0.0, t_c - previous, samples),
                                      period=t_c - previous, residual=last_residual, params=params,
                                      section_level=level, crossings=used)
            previous = t_c
        parts[:] = [p for p in parts if p.t1 >= (previous if previous is not None else t_scan)]
        advance()


def _resample(traj: Trajectory, ta: float, tb: float, chart: str, samples: int) -> np.ndarray:
    tq = np.linspace(ta, tb, samples)
    return _to_ne(sample_at(traj, tq), chart)


def _orbit_derivatives(cycle: LimitCycle) -> np.ndarray:
    if cycle.params is not None:
        f = vector_field(cycle.params, NE)
        return np.array([f(0.0, (n, e)) for n, e in cycle.orbit])
    # closed orbit: last sample repeats the first
    body = cycle.orbit[:-1]
    dt = cycle.times[1] - cycle.times[0]
    d = (np.roll(body, -1, axis=0) - np.roll(body, 1, axis=0)) / (2 * dt)
    return np.vstack([d, d[:1]])


def _runs(labels: np.ndarray):
    """Cyclic runs as (start, length, value); a single run starts at 0."""
    m = len(labels)
    changes = np.nonzero(labels != np.roll(labels, 1))[0]
    if len(changes) == 0:
        return [(0, m, labels[0])]
    out = []
    for j, start in enumerate(changes):
        end = changes[j + 1] if j + 1 < len(changes) else changes[0] + m
        out.append((int(start), int(end - start), labels[start]))
    return out


def segment_phases(cycle: LimitCycle, theta: float = DEFAULT_THETA, min_len: int = DEFAULT_MIN_LEN) -> list[PhaseSegment]:
    """Split the orbit into alternating fast and slow segments.

    A sample is fast when the range-normalised price speed exceeds
    ``theta`` times the range-normalised EROEI speed. Runs shorter than
    ``min_len`` samples are absorbed by their neighbours, shortest first.
    Segments are listed in time order starting from the first fast one.
    """
    if not theta > 1:
        raise ValidationError(f"theta must be > 1, got {theta!r}")
    if min_len < 1:
        raise ValidationError(f"min_len must be >= 1, got {min_len!r}")
    ranges = np.ptp(cycle.orbit, axis=0)
    if np.all(ranges < 1e-12):
        raise DegenerateGeometryError("orbit has zero extent in both coordinates")
    d = _orbit_derivatives(cycle)
    dn = np.abs(d[:, 0]) / ranges[0] if ranges[0] >= 1e-12 else np.zeros(len(d))
    de = np.abs(d[:, 1]) / ranges[1] if ranges[1] >= 1e-12 else np.zeros(len(d))
    fast = dn > theta * de
    # the closing sample duplicates sample 0
    m = len(fast) - 1
    labels = fast[:m].copy()

    runs = _runs(labels)
    while len(runs) > 1:
        shortest = min(range(len(runs)), key=lambda j: (runs[j][1], runs[j][0]))
        start, length, value = runs[shortest]
        if length >= min_len:
            break
        labels[(start + np.arange(length)) % m] = not value
        runs = _runs(labels)

    # time order from the run holding sample 0, then rotate to the first fast run
    runs.sort(key=lambda r: r[0])
    if runs[-1][0] + runs[-1][1] > m:
        runs = runs[-1:] + runs[:-1]
    first = next((j for j, r in enumerate(runs) if r[2]), 0)
    runs = runs[first:] + runs[:first]
    segments = []
    for start, length, value in runs:
        idx = (start + np.arange(length)) % m
        num = float(dn[idx].mean())
        den = float(de[idx].mean())
        ratio = num / den if den > 0 else math.inf
        segments.append(PhaseSegment(FAST if value else SLOW, start, (start + length) % m, length, ratio))
    return segments


def fast_fraction(cycle: LimitCycle, segments: list[PhaseSegment]) -> float:
    """Share of the period spent in fast segments (samples are uniform in time)."""
    m = len(cycle.orbit) - 1
    return sum(s.length for s in segments if s.kind == FAST) / m


def signed_area(cycle: LimitCycle) -> float:
    """Shoelace area with e as abscissa and n as ordinate."""
    x, y = cycle.e, cycle.n
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def orientation(cycle: LimitCycle) -> str:
    ranges = np.ptp(cycle.orbit, axis=0)
    area = signed_area(cycle)
    if ranges[0] <= 0 or ranges[1] <= 0 or abs(area) <= 1e-12 * ranges[0] * ranges[1]:
        raise DegenerateGeometryError("orbit encloses no area")
    return CLOCKWISE if area < 0 else COUNTERCLOCKWISE


def price_levels_at(cycle: LimitCycle, e: float) -> list[float]:
    """Prices where the orbit passes through EROEI ``e`` (linear interpolation)."""
    ev, nv = cycle.e, cycle.n
    out = []
    for i in range(len(ev) - 1):
        a, b = ev[i] - e, ev[i + 1] - e
        if a == 0:
            out.append(float(nv[i]))
        elif a * b < 0:
            w = a / (a - b)
            out.append(float(nv[i] + w * (nv[i + 1] - nv[i])))
    return sorted(out)


def bistability_ratios(cycle: LimitCycle, probes: int = 11) -> list[float]:
    """Max/min price ratio at ``probes`` EROEI values across the middle third of the orbit's range."""
    lo, hi = float(cycle.e.min()), float(cycle.e.max())
    width = hi - lo
    out = []
    for e in np.linspace(lo + width / 3, hi - width / 3, probes):
        levels = price_levels_at(cycle, float(e))
        out.append(levels[-1] / levels[0] if len(levels) >= 2 and levels[0] > 0 else 1.0)
    return out
