"""Quasi-static analysis of the fast equation with the foliage ``s`` frozen.

Setting dN/dt = 0 and dividing out the trivial root N = 0 leaves the monic
cubic

    p(N) = N^3 - k s N^2 + (eta^2 s^2 + b k s / r) N - k eta^2 s^3

with dN/dt = -(r / (k s)) * N / (eta^2 s^2 + N^2) * p(N). All real roots
of p are positive (Descartes' rule of signs), and a root is stable exactly
when p' > 0 there.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguityError, DomainError, ValidationError
from .model import ModelParams

STABLE = "stable"
UNSTABLE = "unstable"
NEAR_FOLD_GAP = 1e-8
DEFAULT_SCAN_POINTS = 512


class NearFoldWarning(UserWarning):
    """Two equilibria are closer than ``NEAR_FOLD_GAP``."""


@dataclass(frozen=True)
class Root:
    n: float
    stability: str

    @property
    def stable(self) -> bool:
        return self.stability == STABLE


@dataclass(frozen=True)
class EquilibriumSet:
    s: float
    roots: tuple[Root, ...]
    zero_stability: str = UNSTABLE
    includes_zero: bool = True

    @property
    def values(self) -> list[float]:
        return [rt.n for rt in self.roots]

    @property
    def stable_values(self) -> list[float]:
        return [rt.n for rt in self.roots if rt.stable]


@dataclass(frozen=True)
class FoldPair:
    s_minus: float
    s_plus: float
    bracket_width: float


@dataclass(frozen=True)
class JumpEvent:
    s: float
    from_branch: str
    to_branch: str
    n_from: float
    n_to: float


@dataclass
class HysteresisTrace:
    schedule: np.ndarray
    branch: np.ndarray
    branch_labels: list[str]
    jumps: list[JumpEvent] = field(default_factory=list)


def _check_s(s):
    if not (isinstance(s, (int, float)) and math.isfinite(s) and s > 0):
        raise DomainError(f"s must be a finite number > 0, got {s!r}")


def equilibrium_polynomial(params: ModelParams, s: float) -> tuple[float, float, float, float]:
    """Coefficients ``(1, c2, c1, c0)`` of the monic equilibrium cubic."""
    _check_s(s)
    k, eta, r, b = params.k, params.eta, params.r, params.b
    return (1.0, -k * s, eta * eta * s * s + b * k * s / r, -k * eta * eta * s ** 3)


def _poly(c, x):
    return ((x + c[1]) * x + c[2]) * x + c[3]


def _dpoly(c, x):
    return (3 * x + 2 * c[1]) * x + c[2]


def discriminant(c) -> float:
    """Cubic discriminant; positive iff three distinct real roots."""
    _, a2, a1, a0 = c
    return (18 * a2 * a1 * a0 - 4 * a2 ** 3 * a0 + a2 ** 2 * a1 ** 2
            - 4 * a1 ** 3 - 27 * a0 ** 2)


def _bisect(fn, lo, hi, flo=None):
    flo = fn(lo) if flo is None else flo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish(c, x):
    for _ in range(8):
        d = _dpoly(c, x)
        if d == 0:
            break
        step = _poly(c, x) / d
        x_new = x - step
        if not math.isfinite(x_new):
            break
        if abs(step) <= 1e-15 * abs(x):
            return x_new
        x = x_new
    return x


def _cubic_real_roots(c) -> list[float]:
    """Real roots of a monic cubic by the trigonometric / Cardano formulas."""
    _, a2, a1, a0 = c
    shift = a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p < 0 and disc < 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        return sorted(m * math.cos(theta - 2 * math.pi * j / 3) - shift for j in range(3))
    sq = math.sqrt(max(disc, 0.0))
    u = math.copysign(abs(-q / 2 + sq) ** (1 / 3), -q / 2 + sq)
    v = math.copysign(abs(-q / 2 - sq) ** (1 / 3), -q / 2 - sq)
    return [u + v - shift]


def _critical_points(c):
    _, a2, a1, _ = c
    d = a2 * a2 - 3 * a1
    if d <= 0:
        return None
    sq = math.sqrt(d)
    # stable form of (-a2 -+ sq) / 3
    if a2 < 0:
        hi = (-a2 + sq) / 3
        lo = a1 / (3 * hi)
    else:
        lo = (-a2 - sq) / 3
        hi = a1 / (3 * lo)
    return lo, hi


def _bracketed_roots(c) -> list[float]:
    """Roots by bisection between the critical points; used near degeneracy."""
    upper = 1.0 + max(abs(c[1]), abs(c[2]), abs(c[3]))
    crit = _critical_points(c)
    fn = lambda x: _poly(c, x)
    points = [0.0, *(crit or ()), upper]
    roots = []
    for a, b in zip(points, points[1:]):
        fa, fb = fn(a), fn(b)
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(_bisect(fn, a, b, fa))
    if fn(upper) == 0:
        roots.append(upper)
    return sorted(set(roots))


def positive_roots(c) -> list[float]:
    roots = _cubic_real_roots(c)
    if len(roots) == 3 and min(b - a for a, b in zip(roots, roots[1:])) < 1e-6 * max(1.0, abs(roots[-1])):
        roots = _bracketed_roots(c)
    else:
        roots = sorted(_polish(c, x) for x in roots)
    return [x for x in roots if x > 0]


def budworm_equilibria(params: ModelParams, s: float) -> EquilibriumSet:
    """Positive equilibria of the fast equation at fixed ``s``, with stability."""
    c = equilibrium_polynomial(params, s)
    roots = positive_roots(c)
    if len(roots) == 2 or (len(roots) > 1 and min(b - a for a, b in zip(roots, roots[1:])) < NEAR_FOLD_GAP):
        warnings.warn(f"near fold at s={s!r}: equilibria closer than {NEAR_FOLD_GAP}", NearFoldWarning, stacklevel=2)
    labelled = tuple(Root(x, STABLE if _dpoly(c, x) > 0 else UNSTABLE) for x in roots)
    if len(labelled) == 3:
        labelled = (Root(roots[0], STABLE), Root(roots[1], UNSTABLE), Root(roots[2], STABLE))
    return EquilibriumSet(s=float(s), roots=labelled)


def root_count(params: ModelParams, s: float) -> int:
    """1 or 3, from the sign of the cubic discriminant."""
    return 3 if discriminant(equilibrium_polynomial(params, s)) > 0 else 1


def fold_points(params: ModelParams, s_range, points: int = DEFAULT_SCAN_POINTS) -> FoldPair | None:
    """Locate the critical values s- < s+ bounding the bistable window.

    Scans a geometric grid of ``points`` values of s, then bisects each
    change in root count to a bracket of ``1e-9 * s``. Returns None when
    the count never changes over the range.
    """
    s_lo, s_hi = (float(v) for v in s_range)
    if not (math.isfinite(s_lo) and math.isfinite(s_hi) and 0 < s_lo < s_hi):
        raise ValidationError(f"need 0 < s_lo < s_hi, got {s_range!r}")
    if points < 2:
        raise ValidationError("points must be >= 2")
    grid = np.geomspace(s_lo, s_hi, points)
    counts = [root_count(params, s) for s in grid]
    transitions = [i for i in range(points - 1) if counts[i] != counts[i + 1]]
    if not transitions:
        return None
    if len(transitions) != 2:
        raise AmbiguityError(f"expected 2 root-count transitions in {s_range!r}, found {len(transitions)}")
    sign = lambda s: 1.0 if root_count(params, s) == 3 else -1.0
    folds, width = [], 0.0
    for i in transitions:
        lo, hi = float(grid[i]), float(grid[i + 1])
        f_lo = sign(lo)
        while hi - lo > 1e-9 * lo:
            mid = 0.5 * (lo + hi)
            if sign(mid) == f_lo:
                lo = mid
            else:
                hi = mid
        folds.append(0.5 * (lo + hi))
        width = max(width, hi - lo)
    return FoldPair(folds[0], folds[1], width)


def _fold_between(params, s_a, s_b):
    """Bisect the root-count change between s_a (count 3) and s_b (count 1)."""
    lo, hi = s_a, s_b
    while abs(hi - lo) > 1e-9 * min(lo, hi):
        mid = 0.5 * (lo + hi)
        if root_count(params, mid) == 3:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sample_schedule(schedule, points_per_leg):
    vertices = [float(v) for v in schedule]
    if len(vertices) < 1:
        raise ValidationError("schedule must contain at least one value")
    if not all(math.isfinite(v) and v > 0 for v in vertices):
        raise ValidationError("schedule values must be finite and > 0")
    if points_per_leg < 1:
        raise ValidationError("points_per_leg must be >= 1")
    out = [vertices[0]]
    for a, b in zip(vertices, vertices[1:]):
        out.extend(np.linspace(a, b, points_per_leg + 1)[1:].tolist())
    return np.array(out)


def quasi_static_sweep(params: ModelParams, schedule, points_per_leg: int = 200,
                       initial_branch: str | None = None) -> HysteresisTrace:
    """Follow the occupied stable branch along a piecewise-linear s path.

    ``schedule`` lists the vertices of the path. The population relaxes
    instantly, so it stays on its branch until that branch vanishes at a
    fold and then jumps to the other stable branch. Jump locations are
    refined by bisection to the fold. When the path starts inside the
    bistable window ``initial_branch`` ("low" or "high") must be given.
    """
    s_path = _sample_schedule(schedule, points_per_leg)
    eq = budworm_equilibria(params, s_path[0])
    stable = eq.stable_values
    if len(stable) == 1:
        label = None
        current = stable[0]
    else:
        if initial_branch not in ("low", "high"):
            raise ValidationError("schedule starts inside the bistable window; pass initial_branch='low' or 'high'")
        current = stable[0] if initial_branch == "low" else stable[-1]
        label = initial_branch
    prev_roots = eq.values
    branch = [current]
    labels = [label]
    jumps = []
    for s_prev, s in zip(s_path, s_path[1:]):
        eq = budworm_equilibria(params, s)
        roots = eq.values
        stable = eq.stable_values
        if len(prev_roots) == 3 and len(roots) == 1:
            survivor = roots[0]
            was_low = current < prev_roots[1]
            survivor_low = survivor < prev_roots[1]
            if was_low != survivor_low:
                s_fold = _fold_between(params, s_prev, s)
                to_label = "low" if survivor_low else "high"
                from_label = "low" if was_low else "high"
                jumps.append(JumpEvent(s_fold, from_label, to_label, current, survivor))
            current = survivor
            label = "low" if survivor_low else "high"
        elif len(roots) == 3 and len(prev_roots) == 1:
            current = min(stable, key=lambda x: abs(x - current) / max(x, current))
            label = "low" if current == stable[0] else "high"
        else:
            current = min(stable, key=lambda x: abs(x - current) / max(x, current))
            if len(stable) == 2:
                label = "low" if current == stable[0] else "high"
        prev_roots = roots
        branch.append(current)
        labels.append(label)
    # single-branch stretches take the label of the branch they connect to
    known = [lab for lab in labels if lab is not None]
    fill = known[0] if known else "low"
    for i, lab in enumerate(labels):
        if lab is None:
            labels[i] = fill
        else:
            fill = lab
    return HysteresisTrace(s_path, np.array(branch), labels, jumps)


def branch_diagram(params: ModelParams, s_grid) -> list[dict]:
    """Rows ``{s, n, stability}`` including the trivial N = 0 equilibrium.

    A grid value where the model is undefined yields one row with
    ``stability`` set to ``"error: ..."`` and ``n`` empty.
    """
    grid = [float(v) for v in s_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValidationError("s_grid must be sorted ascending")
    rows = []
    for s in grid:
        try:
            eq = budworm_equilibria(params, s)
        except DomainError as exc:
            rows.append({"s": s, "n": None, "stability": f"error: {exc}"})
            continue
        rows.append({"s": s, "n": 0.0, "stability": eq.zero_stability})
        rows.extend({"s": s, "n": rt.n, "stability": rt.stability} for rt in eq.roots)
    return rows
