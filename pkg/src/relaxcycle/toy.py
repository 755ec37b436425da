"""Discrete two-well oil market.

Tier 1 supplies up to ``cap1`` at price ``p1``; beyond that the market buys
from tier 2 at ``p2``. Each step either the price catches up with the tier
demanded (a fast move, demand fixed) or demand adjusts to the current price
(a slow move, price fixed). The resulting loop in the (demand, price) plane
is a rectangle with four legs:

    1-2  demand rises at the low price      (slow)
    2-3  price jumps to the high tier       (fast)
    3-4  demand falls at the high price     (slow)
    4-1  price drops back to the low tier   (fast)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

LEG_KIND = {"1-2": "slow", "2-3": "fast", "3-4": "slow", "4-1": "fast"}


@dataclass(frozen=True)
class ToyMarketConfig:
    cap1: float = 1000.0
    p1: float = 100.0
    p2: float = 200.0
    demand_up: float = 50.0
    demand_down: float = 300.0
    steps: int = 200

    def __post_init__(self):
        for name in ("cap1", "p1", "p2", "demand_up", "demand_down"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValidationError(f"{name} must be a finite number, got {v!r}")
        if self.cap1 <= 0:
            raise ValidationError("cap1 must be > 0")
        if not 0 < self.p1 < self.p2:
            raise ValidationError("prices must satisfy 0 < p1 < p2")
        if self.demand_up <= 0 or self.demand_down <= 0:
            raise ValidationError("demand_up and demand_down must be > 0")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValidationError("steps must be a positive integer")


@dataclass(frozen=True)
class ToyStep:
    demand: float
    price: float
    leg: str  # one of LEG_KIND, or "start" for the initial record

    @property
    def kind(self) -> str:
        return LEG_KIND.get(self.leg, "start")


def toy_two_well(config: ToyMarketConfig, initial_demand: float = 0.0) -> list[ToyStep]:
    if not (math.isfinite(initial_demand) and initial_demand >= 0):
        raise ValidationError(f"initial_demand must be >= 0, got {initial_demand!r}")
    demand = float(initial_demand)
    price = config.p1 if demand <= config.cap1 else config.p2
    out = [ToyStep(demand, price, "start")]
    for _ in range(config.steps):
        wanted = config.p1 if demand <= config.cap1 else config.p2
        if wanted != price:
            leg = "2-3" if wanted > price else "4-1"
            price = wanted
        elif price == config.p1:
            demand += config.demand_up
            leg = "1-2"
        else:
            demand = max(0.0, demand - config.demand_down)
            leg = "3-4"
        out.append(ToyStep(demand, price, leg))
    return out


def steady_period(trajectory: list[ToyStep]) -> list[ToyStep]:
    """Steps of the last complete period, found by matching the final state.

    Raises ValidationError when the trajectory has not yet repeated a state.
    """
    last = trajectory[-1]
    for i in range(len(trajectory) - 2, -1, -1):
        s = trajectory[i]
        if s.price == last.price and math.isclose(s.demand, last.demand, rel_tol=1e-12, abs_tol=1e-9):
            return trajectory[i + 1:]
    raise ValidationError("trajectory has not reached a periodic state; increase steps")


def count_legs(period: list[ToyStep]) -> dict[str, int]:
    """Count maximal runs of equal leg label over one cyclic period."""
    legs = [s.leg for s in period]
    runs = [leg for i, leg in enumerate(legs) if leg != legs[i - 1]]
    if not runs:
        runs = legs[:1]
    counts = {"fast": 0, "slow": 0}
    for leg in runs:
        counts[LEG_KIND[leg]] += 1
    return counts
