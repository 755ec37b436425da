"""Adaptive Dormand-Prince 5(4) integration of planar vector fields.

States are 2-vectors. The vector field is any callable ``f(t, y)`` returning
a pair; it may raise :class:`~relaxcycle.errors.DomainError` for states
where it is undefined, which the stepper treats as a rejected step.

Coefficients: Hairer, Norsett & Wanner, Solving ODEs I, p. 178.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    RhsDomainError,
    StepBudgetError,
    StepUnderflowError,
    ValidationError,
)

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th-order weights minus embedded 4th-order weights
E1 = 35 / 384 - 5179 / 57600
E3 = 500 / 1113 - 7571 / 16695
E4 = 125 / 192 - 393 / 640
E5 = -2187 / 6784 + 92097 / 339200
E6 = 11 / 84 - 187 / 2100
E7 = -1 / 40

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
PI_BETA = 0.04
PI_ALPHA = 0.2 - 0.75 * PI_BETA


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = math.inf
    max_steps: int = 1_000_000
    fixed_step: float | None = None  # disables error control when set

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("rel_tol and abs_tol must be > 0")
        if not (0 < self.h_min <= self.h_init <= self.h_max):
            raise ValidationError(
                f"need 0 < h_min <= h_init <= h_max, got "
                f"{self.h_min!r}, {self.h_init!r}, {self.h_max!r}"
            )
        if int(self.max_steps) != self.max_steps or self.max_steps <= 0:
            raise ValidationError(f"max_steps must be a positive integer, got {self.max_steps!r}")
        if self.fixed_step is not None and not self.fixed_step > 0:
            raise ValidationError("fixed_step must be > 0")


@dataclass
class Trajectory:
    """Accepted steps of one integration, endpoints included."""

    times: np.ndarray
    states: np.ndarray  # shape (n, 2)
    derivs: np.ndarray  # vector field at each node, used for dense output
    chart: str | None = None
    accepted: int = 0
    rejected: int = 0
    h_next: float = field(default=math.nan, repr=False)

    def __post_init__(self):
        if len(self.times) != len(self.states) or len(self.times) != len(self.derivs):
            raise ValidationError("times, states and derivs must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValidationError("times must be strictly increasing")

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t1(self) -> float:
        return float(self.times[-1])

    @property
    def final(self) -> tuple[float, float]:
        return float(self.states[-1, 0]), float(self.states[-1, 1])

    @classmethod
    def concat(cls, parts: list["Trajectory"]) -> "Trajectory":
        """Join trajectories where each part starts at the previous part's end."""
        times = [parts[0].times]
        states = [parts[0].states]
        derivs = [parts[0].derivs]
        for p in parts[1:]:
            times.append(p.times[1:])
            states.append(p.states[1:])
            derivs.append(p.derivs[1:])
        return cls(
            np.concatenate(times),
            np.concatenate(states),
            np.concatenate(derivs),
            chart=parts[0].chart,
            accepted=sum(p.accepted for p in parts),
            rejected=sum(p.rejected for p in parts),
            h_next=parts[-1].h_next,
        )


def _pack(times, states, derivs, chart, accepted, rejected, h_next):
    return Trajectory(
        np.asarray(times, dtype=float),
        np.asarray(states, dtype=float).reshape(-1, 2),
        np.asarray(derivs, dtype=float).reshape(-1, 2),
        chart=chart,
        accepted=accepted,
        rejected=rejected,
        h_next=h_next,
    )


def _dp_step(f, t, y0, y1, k1, h):
    """One Dormand-Prince step; returns (new state, its derivative, error vector)."""
    k1a, k1b = k1
    k2 = f(t + C2 * h, (y0 + h * A21 * k1a, y1 + h * A21 * k1b))
    k3 = f(t + C3 * h, (y0 + h * (A31 * k1a + A32 * k2[0]),
                        y1 + h * (A31 * k1b + A32 * k2[1])))
    k4 = f(t + C4 * h, (y0 + h * (A41 * k1a + A42 * k2[0] + A43 * k3[0]),
                        y1 + h * (A41 * k1b + A42 * k2[1] + A43 * k3[1])))
    k5 = f(t + C5 * h, (y0 + h * (A51 * k1a + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
                        y1 + h * (A51 * k1b + A52 * k2[1] + A53 * k3[1] + A54 * k4[1])))
    k6 = f(t + h, (y0 + h * (A61 * k1a + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0]),
                   y1 + h * (A61 * k1b + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1])))
    n0 = y0 + h * (B1 * k1a + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0])
    n1 = y1 + h * (B1 * k1b + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1])
    k7 = f(t + h, (n0, n1))
    e0 = h * (E1 * k1a + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0])
    e1 = h * (E1 * k1b + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1])
    return (n0, n1), k7, (e0, e1)


def integrate(rhs, y0, t_span, settings: IntegratorSettings | None = None, chart: str | None = None) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` over ``t_span`` and return every accepted step.

    The local error estimate of each accepted step satisfies the scaled RMS
    bound ``|err_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)) <= 1``.
    On failure an :class:`IntegrationError` subclass is raised carrying the
    partial trajectory.
    """
    settings = settings or IntegratorSettings()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (math.isfinite(t0) and math.isfinite(t1) and t1 > t0):
        raise ValidationError(f"need finite t1 > t0, got {t_span!r}")
    if len(y0) != 2:
        raise ValidationError(f"initial state must be a 2-vector, got {y0!r}")
    y = (float(y0[0]), float(y0[1]))
    if not all(math.isfinite(v) for v in y):
        raise ValidationError(f"initial state must be finite, got {y0!r}")

    times, states, derivs = [t0], [y], []
    accepted = rejected = 0

    def fail(cls, message, t):
        n = len(derivs)
        return cls(message, t, _pack(times[:n], states[:n], derivs, chart, accepted, rejected, h))

    h = settings.fixed_step or settings.h_init
    try:
        k1 = tuple(rhs(t0, y))
    except DomainError as exc:
        raise fail(RhsDomainError, str(exc), t0) from exc
    derivs.append(k1)

    rtol, atol = settings.rel_tol, settings.abs_tol
    fixed = settings.fixed_step is not None
    err_prev = 1e-4
    t = t0
    span = t1 - t0
    while t < t1:
        if accepted >= settings.max_steps:
            raise fail(StepBudgetError, f"step budget of {settings.max_steps} exhausted", t)
        h = min(h, settings.h_max)
        last = t + h >= t1 - 1e-12 * span
        if last:
            h = t1 - t
        try:
            y_new, k_new, err = _dp_step(rhs, t, y[0], y[1], k1, h)
            ok = all(math.isfinite(v) for v in (*y_new, *k_new))
        except DomainError as exc:
            domain_exc, ok = exc, False
        else:
            domain_exc = None

        if fixed:
            if not ok:
                if domain_exc is not None:
                    raise fail(RhsDomainError, str(domain_exc), t) from domain_exc
                raise fail(StepUnderflowError, "non-finite state in fixed-step mode", t)
            err_norm = 0.0
        elif not ok:
            err_norm = math.inf
        else:
            sc0 = atol + rtol * max(abs(y[0]), abs(y_new[0]))
            sc1 = atol + rtol * max(abs(y[1]), abs(y_new[1]))
            err_norm = math.sqrt(0.5 * ((err[0] / sc0) ** 2 + (err[1] / sc1) ** 2))

        if err_norm <= 1.0:
            t = t1 if last else t + h
            y, k1 = y_new, k_new
            times.append(t)
            states.append(y)
            derivs.append(k1)
            accepted += 1
            if not fixed:
                if err_norm == 0.0:
                    fac = FAC_MAX
                else:
                    fac = SAFETY * err_norm ** (-PI_ALPHA) * err_prev ** PI_BETA
                    fac = min(FAC_MAX, max(FAC_MIN, fac))
                err_prev = max(err_norm, 1e-4)
                h_prev = h
                h = h * fac
                if last:
                    h = max(h, h_prev)
                elif h < settings.h_min or t + h == t:
                    raise fail(StepUnderflowError, f"step size fell below h_min={settings.h_min!r}", t)
        else:
            rejected += 1
            if math.isinf(err_norm):
                h *= 0.25
            else:
                h *= max(FAC_MIN, SAFETY * err_norm ** (-0.2))
            if h < settings.h_min:
                if domain_exc is not None:
                    raise fail(RhsDomainError, str(domain_exc), t) from domain_exc
                raise fail(StepUnderflowError, f"step size fell below h_min={settings.h_min!r}", t)
    return _pack(times, states, derivs, chart, accepted, rejected, h)


def hermite(t, ta, tb, ya, yb, fa, fb):
    """Cubic Hermite interpolant on one step, vectorised over ``t``."""
    h = tb - ta
    s = (t - ta) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * ya + h10 * h * fa + h01 * yb + h11 * h * fb


def sample_at(traj: Trajectory, times) -> np.ndarray:
    """Dense output at ``times``; exact at stored nodes."""
    tq = np.atleast_1d(np.asarray(times, dtype=float))
    if tq.size == 0:
        return np.empty((0, 2))
    lo, hi = traj.t0, traj.t1
    if np.any(tq < lo) or np.any(tq > hi) or not np.all(np.isfinite(tq)):
        raise ValidationError(f"sample times must lie in [{lo!r}, {hi!r}]")
    if len(traj.times) == 1:
        return np.repeat(traj.states[:1], tq.size, axis=0)
    idx = np.searchsorted(traj.times, tq, side="right") - 1
    idx = np.clip(idx, 0, len(traj.times) - 2)
    ta, tb = traj.times[idx], traj.times[idx + 1]
    out = hermite(tq[:, None], ta[:, None], tb[:, None],
                  traj.states[idx], traj.states[idx + 1],
                  traj.derivs[idx], traj.derivs[idx + 1])
    exact = tq == ta
    out[exact] = traj.states[idx[exact]]
    at_end = tq == tb
    out[at_end] = traj.states[idx[at_end] + 1]
    return out
