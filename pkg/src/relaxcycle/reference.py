"""Reference parameter sets and the search that produced the cyclic one.

The fast equation uses r=1, k=10, b=1, eta=1, which is bistable for s in
roughly (0.384, 0.560). The slow equation is tuned so the slow nullcline

    n = (rho / eps) * s * (1 - s / s_max)

passes through the point (s, n) = (0.5, 1) on the unstable middle branch
(n/s = 2 there), with s_max = 1. That fixes eps = rho / 4 and leaves rho,
the time-scale separation, to scan over [1e-3, 1e-1]; see
:func:`search_cyclic_set`. Every scanned rho from about 2e-3 up to 1e-1
gives a converged cycle with four fast/slow segments (at 1e-3 the fast legs
get shorter than the default ``min_len`` and merge away). rho = 0.05 is a
round value inside that band with a short period (about 65), which keeps
integration cheap.
"""

from __future__ import annotations

import numpy as np

from .cycle import fast_fraction, find_limit_cycle, segment_phases
from .errors import NumericalError
from .integrator import IntegratorSettings
from .model import ModelParams, StateNE

BISTABLE = ModelParams(r=1.0, k=10.0, b=1.0, eta=1.0, rho=0.05, s_max=1.0, eps=0.0125)
CYCLIC = BISTABLE
CYCLIC_Y0 = StateNE(n=0.3, e=2.5)
FOLD_RANGE = (0.1, 2.0)


def middle_branch_eps(params: ModelParams, ratio: float) -> float:
    """eps placing the slow nullcline through the fast nullcline point with n/s = ``ratio``.

    On the fast nullcline, n = ratio * s with
    s = b * ratio / (r * (1 - ratio / k) * (eta^2 + ratio^2)).
    """
    r, k, b, eta = params.r, params.k, params.b, params.eta
    s = b * ratio / (r * (1.0 - ratio / k) * (eta * eta + ratio * ratio))
    n = ratio * s
    return params.rho * s * (1.0 - s / params.s_max) / n


def search_cyclic_set(base: ModelParams = BISTABLE, rhos=None, ratio: float = 2.0,
                      settings: IntegratorSettings | None = None) -> list[dict]:
    """Scan rho, set eps by :func:`middle_branch_eps`, and report each outcome.

    Each row holds rho, eps, status and, for converged cycles, the period,
    segment count and fast fraction. A candidate is acceptable when the
    status is "ok", there are 4 segments and the fast fraction is < 0.3.
    """
    if rhos is None:
        rhos = np.geomspace(1e-3, 1e-1, 7)
    rows = []
    for rho in rhos:
        params = base.with_(rho=float(rho))
        params = params.with_(eps=middle_branch_eps(params, ratio))
        row = {"rho": params.rho, "eps": params.eps}
        try:
            cyc = find_limit_cycle(params, CYCLIC_Y0, settings)
        except NumericalError as exc:
            row.update(status=type(exc).__name__)
        else:
            segs = segment_phases(cyc)
            row.update(status="ok", period=cyc.period, segments=len(segs),
                       fast_fraction=fast_fraction(cyc, segs))
        rows.append(row)
    return rows
