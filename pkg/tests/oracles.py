"""Independent reference computations used by the tests."""

import math

import numpy as np

from relaxcycle.model import ModelParams


def growth_per_capita(p: ModelParams, n, s):
    """dN/dt divided by N, straight from the model equation."""
    return p.r * (1 - n / (p.k * s)) - p.b * n / (p.eta**2 * s**2 + n**2)


def scan_equilibria(p: ModelParams, s: float, points: int = 20000):
    """Positive equilibria by a sign-change scan on a log grid plus bisection.

    All positive equilibria lie below k*s (dN/dt < 0 beyond the ceiling).
    """
    grid = np.geomspace(p.k * s * 1e-10, p.k * s, points)
    g = growth_per_capita(p, grid, s)
    roots = []
    for i in np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]:
        lo, hi = grid[i], grid[i + 1]
        glo = growth_per_capita(p, lo, s)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            gm = growth_per_capita(p, mid, s)
            if (gm > 0) == (glo > 0):
                lo, glo = mid, gm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


def fold_values_parametric(p: ModelParams):
    """Local extrema of s(u) along the nontrivial nullcline n = u*s.

    On the nullcline s(u) = b*u / (r*(1 - u/k)*(eta^2 + u^2)) for 0 < u < k;
    its interior local max and min are the folds s+ and s-.
    """
    def s_of(u):
        return p.b * u / (p.r * (1 - u / p.k) * (p.eta**2 + u**2))

    u = np.linspace(p.k * 1e-6, p.k * (1 - 1e-6), 400001)
    s = s_of(u)
    d = np.diff(s)
    turns = np.nonzero(np.sign(d[1:]) != np.sign(d[:-1]))[0] + 1
    out = []
    for i in turns:
        a, b = u[i - 1], u[i + 1]
        sign = 1 if s[i] > s[i - 1] else -1  # maximum if rising into i
        # golden-section on the bracket
        gr = (math.sqrt(5) - 1) / 2
        for _ in range(200):
            c = b - gr * (b - a)
            e = a + gr * (b - a)
            if sign * s_of(c) > sign * s_of(e):
                b = e
            else:
                a = c
        out.append(float(s_of(0.5 * (a + b))))
    return sorted(out)
