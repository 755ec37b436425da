"""Budworm/oil-price model: parameters, states and the vector field.

The fast variable ``n`` is the budworm population, read economically as the
average oil price. The slow variable is the foliage ``s``, read as 1/EROEI,
or equivalently the EROEI ``e = 1/s``. The two charts are ``"ns"`` and
``"ne"``; in both, 2-vectors are ordered ``(n, slow)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import DomainError, ValidationError

NS = "ns"
NE = "ne"
CHARTS = (NS, NE)


@dataclass(frozen=True)
class ModelParams:
    """Model constants.

    Attributes:
        r: growth rate of the price (budworm intrinsic growth).
        k: price ceiling per unit of s; the carrying capacity is ``k*s``.
        b: saturating predation / investment cap (the product beta*P).
        eta: half-saturation coefficient, per unit of s.
        rho: growth rate of s (slow).
        s_max: upper bound on s, i.e. EROEI never falls below ``1/s_max``.
        eps: depressive effect of the price on s.
        b_drift: linear growth rate of ``b`` in time.
        smax_drift: linear growth rate of ``s_max`` in time.
    """

    r: float = 1.0
    k: float = 10.0
    b: float = 1.0
    eta: float = 1.0
    rho: float = 0.05
    s_max: float = 1.0
    eps: float = 0.0125
    b_drift: float = 0.0
    smax_drift: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{f.name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ValidationError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        for name in ("r", "k", "eta", "rho", "s_max"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)!r}")
        # b = 0 (no predation) and eps = 0 (no price feedback) are the limiting cases
        for name in ("b", "eps", "b_drift", "smax_drift"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def has_drift(self) -> bool:
        return self.b_drift > 0 or self.smax_drift > 0

    def b_at(self, t: float) -> float:
        return self.b + self.b_drift * t

    def s_max_at(self, t: float) -> float:
        return self.s_max + self.smax_drift * t

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class StateNS:
    n: float
    s: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.n) and math.isfinite(self.s)):
            raise DomainError(f"non-finite state n={self.n!r}, s={self.s!r}")
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n!r}")
        if self.s <= 0:
            raise DomainError(f"s must be > 0, got {self.s!r}")


@dataclass(frozen=True)
class StateNE:
    n: float
    e: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.n) and math.isfinite(self.e)):
            raise DomainError(f"non-finite state n={self.n!r}, e={self.e!r}")
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n!r}")
        if self.e <= 0:
            raise DomainError(f"e must be > 0, got {self.e!r}")


@dataclass(frozen=True)
class Derivatives:
    dn: float
    dslow: float
    chart: str


def _budworm(p: ModelParams, n: float, s: float, t: float) -> tuple[float, float]:
    if not s > 0:
        raise DomainError(f"s must be > 0, got {s!r}")
    n2 = n * n
    es = p.eta * s
    dn = p.r * n * (1.0 - n / (p.k * s)) - p.b_at(t) * n2 / (es * es + n2)
    ds = p.rho * s * (1.0 - s / p.s_max_at(t)) - p.eps * n
    return dn, ds


def _eroei(p: ModelParams, n: float, e: float, t: float) -> tuple[float, float]:
    if not e > 0:
        raise DomainError(f"e must be > 0, got {e!r}")
    n2 = n * n
    ee = p.eta / e
    dn = p.r * n * (1.0 - n * e / p.k) - p.b_at(t) * n2 / (ee * ee + n2)
    de = p.rho * (1.0 / p.s_max_at(t) - e) + p.eps * n * e * e
    return dn, de


def rhs_budworm(params: ModelParams, state: StateNS) -> Derivatives:
    dn, ds = _budworm(params, state.n, state.s, state.t)
    return Derivatives(dn, ds, NS)


def rhs_eroei(params: ModelParams, state: StateNE) -> Derivatives:
    dn, de = _eroei(params, state.n, state.e, state.t)
    return Derivatives(dn, de, NE)


def vector_field(params: ModelParams, chart: str = NE):
    """Return ``f(t, y) -> (dn, dslow)`` on plain 2-tuples for the integrator."""
    if chart == NS:
        fn = _budworm
    elif chart == NE:
        fn = _eroei
    else:
        raise ValidationError(f"unknown chart {chart!r}; expected one of {CHARTS}")

    def field(t, y):
        return fn(params, y[0], y[1], t)

    return field


def to_eroei_chart(state: StateNS) -> StateNE:
    return StateNE(state.n, 1.0 / state.s, state.t)


def from_eroei_chart(state: StateNE) -> StateNS:
    return StateNS(state.n, 1.0 / state.e, state.t)


def mroei(state: StateNE) -> float:
    """Money return on energy investment: price times EROEI."""
    return state.n * state.e
