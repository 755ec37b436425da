"""Parameter sweeps over one or two model parameters.

Every grid point yields exactly one row; failures are recorded in the
``status`` column instead of aborting the sweep. Rows come back in grid
order (row-major for two parameters) whatever the number of workers.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .cycle import find_limit_cycle
from .equilibria import budworm_equilibria, fold_points
from .errors import (
    AmbiguityError,
    CycleBudgetError,
    FixedPointError,
    IntegrationError,
    NumericalError,
    StepBudgetError,
    ValidationError,
)
from .integrator import IntegratorSettings
from .model import ModelParams, StateNE
from .reference import CYCLIC_Y0, FOLD_RANGE

ANALYSES = ("equilibria", "folds", "cycle")
SUMMARY_COLUMNS = ["status", "root_count", "s_minus", "s_plus", "period", "n_min", "n_max"]


@dataclass(frozen=True)
class SweepSpec:
    base: ModelParams
    names: tuple[str, ...]
    grids: tuple[tuple[float, ...], ...]
    analysis: str = "folds"
    s: float = 0.5
    s_range: tuple[float, float] = FOLD_RANGE
    y0: StateNE = CYCLIC_Y0
    settings: IntegratorSettings = field(default_factory=IntegratorSettings)
    max_periods: int = 200

    def __post_init__(self):
        names = tuple(self.names)
        grids = tuple(tuple(float(v) for v in g) for g in self.grids)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "grids", grids)
        if not 1 <= len(names) <= 2:
            raise ValidationError("sweep one or two parameters")
        if len(set(names)) != len(names):
            raise ValidationError("swept parameter names must be distinct")
        if len(grids) != len(names):
            raise ValidationError("need one grid per swept parameter")
        valid = ModelParams.field_names()
        for name, grid in zip(names, grids):
            if name not in valid:
                raise ValidationError(f"unknown parameter {name!r}; expected one of {', '.join(valid)}")
            if not grid:
                raise ValidationError(f"grid for {name!r} is empty")
            if any(b < a for a, b in zip(grid, grid[1:])):
                raise ValidationError(f"grid for {name!r} must be sorted")
            if not all(math.isfinite(v) for v in grid):
                raise ValidationError(f"grid for {name!r} has non-finite values")
        if self.analysis not in ANALYSES:
            raise ValidationError(f"analysis must be one of {ANALYSES}, got {self.analysis!r}")

    @property
    def columns(self) -> list[str]:
        return [*self.names, *SUMMARY_COLUMNS]

    def points(self) -> list[tuple[float, ...]]:
        return list(itertools.product(*self.grids))


def _status(exc: Exception) -> str:
    if isinstance(exc, FixedPointError):
        return "fixed-point"
    if isinstance(exc, (CycleBudgetError, StepBudgetError)):
        return "budget"
    if isinstance(exc, AmbiguityError):
        return "ambiguous"
    if isinstance(exc, IntegrationError):
        return "integration-failed"
    if isinstance(exc, NumericalError):
        return "numerical-error"
    return "invalid"


def evaluate_point(spec: SweepSpec, values: tuple[float, ...]) -> dict:
    row = dict.fromkeys(spec.columns)
    row.update(zip(spec.names, values))
    try:
        params = spec.base.with_(**dict(zip(spec.names, values)))
        if spec.analysis == "equilibria":
            eq = budworm_equilibria(params, spec.s)
            row.update(status="ok", root_count=len(eq.roots), n_min=min(eq.values), n_max=max(eq.values))
        elif spec.analysis == "folds":
            folds = fold_points(params, spec.s_range)
            if folds is None:
                row.update(status="no-folds")
            else:
                row.update(status="ok", s_minus=folds.s_minus, s_plus=folds.s_plus)
        else:
            cyc = find_limit_cycle(params, spec.y0, spec.settings, spec.max_periods)
            row.update(status="ok", period=cyc.period, n_min=float(cyc.n.min()), n_max=float(cyc.n.max()))
    except (ValidationError, NumericalError) as exc:
        row["status"] = _status(exc)
    return row


def _evaluate_packed(args):
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    points = spec.points()
    if workers <= 1 or len(points) == 1:
        return [evaluate_point(spec, p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_packed, [(spec, p) for p in points]))
