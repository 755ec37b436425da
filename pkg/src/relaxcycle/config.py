"""Plain ``key=value`` run configuration.

Lines are ``key = value``; blank lines and lines starting with ``#`` are
ignored. Recognised keys are listed in :data:`KEYS`. Command-line overrides
are applied on top of the file.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .cycle import DEFAULT_MIN_LEN, DEFAULT_THETA
from .errors import ValidationError
from .integrator import IntegratorSettings
from .model import ModelParams


class ConfigError(ValidationError):
    pass


def _float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("not finite")
    return v


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise ValueError("must be >= 1")
    return v


MODEL_KEYS = {f"model.{name}": name for name in ModelParams.field_names()}
SOLVER_KEYS = {
    "solver.rel_tol": ("rel_tol", _float),
    "solver.abs_tol": ("abs_tol", _float),
    "solver.h_min": ("h_min", _float),
    "solver.h_max": ("h_max", float),
    "solver.max_steps": ("max_steps", _pos_int),
}
CYCLE_KEYS = {"cycle.theta": _float, "cycle.min_len": _pos_int}
KEYS = (*MODEL_KEYS, *SOLVER_KEYS, *CYCLE_KEYS)


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    settings: IntegratorSettings = field(default_factory=IntegratorSettings)
    theta: float = DEFAULT_THETA
    min_len: int = DEFAULT_MIN_LEN


def read_config_file(path) -> dict[str, str]:
    name = os.fspath(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {name}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config file {name}: {exc}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{name}:{lineno}: expected key=value, got {raw.strip()!r}")
        if key not in KEYS:
            raise ConfigError(f"{name}:{lineno}: unknown key {key}")
        values[key] = value
    return values


def parse_config(path=None, overrides=None) -> RunConfig:
    values = read_config_file(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key}")
        if value is not None:
            values[key] = str(value).strip()

    model, solver, cycle = {}, {}, {}
    for key, text in values.items():
        try:
            if key in MODEL_KEYS:
                model[MODEL_KEYS[key]] = _float(text)
            elif key in SOLVER_KEYS:
                name, conv = SOLVER_KEYS[key]
                solver[name] = conv(text)
            else:
                cycle[key.split(".", 1)[1]] = CYCLE_KEYS[key](text)
        except ValueError as exc:
            raise ConfigError(f"invalid value for {key}: {text!r} ({exc})") from None

    try:
        params = ModelParams(**model)
    except ValidationError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from None
    defaults = IntegratorSettings()
    h_min = solver.get("h_min", defaults.h_min)
    h_max = solver.get("h_max", defaults.h_max)
    solver.setdefault("h_init", min(max(defaults.h_init, h_min), h_max))
    try:
        settings = IntegratorSettings(**solver)
    except ValidationError as exc:
        raise ConfigError(f"invalid solver settings: {exc}") from None
    theta = cycle.get("theta", DEFAULT_THETA)
    if not theta > 1:
        raise ConfigError(f"invalid value for cycle.theta: must be > 1, got {theta!r}")
    return RunConfig(params, settings, theta, cycle.get("min_len", DEFAULT_MIN_LEN))
