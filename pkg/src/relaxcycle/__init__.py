"""Fast-slow budworm / oil-price model: simulation, fold and cycle analysis."""

__version__ = "0.1.0"

from .cycle import LimitCycle, PhaseSegment, find_limit_cycle, orientation, segment_phases
from .equilibria import (
    EquilibriumSet,
    FoldPair,
    HysteresisTrace,
    branch_diagram,
    budworm_equilibria,
    equilibrium_polynomial,
    fold_points,
    quasi_static_sweep,
)
from .integrator import IntegratorSettings, Trajectory, integrate, sample_at
from .model import (
    Derivatives,
    ModelParams,
    StateNE,
    StateNS,
    from_eroei_chart,
    mroei,
    rhs_budworm,
    rhs_eroei,
    to_eroei_chart,
)
from .toy import ToyMarketConfig, toy_two_well

__all__ = [
    "Derivatives", "EquilibriumSet", "FoldPair", "HysteresisTrace", "IntegratorSettings",
    "LimitCycle", "ModelParams", "PhaseSegment", "StateNE", "StateNS", "ToyMarketConfig",
    "Trajectory", "branch_diagram", "budworm_equilibria", "equilibrium_polynomial",
    "find_limit_cycle", "fold_points", "from_eroei_chart", "integrate", "mroei", "orientation",
    "quasi_static_sweep", "rhs_budworm", "rhs_eroei", "sample_at", "segment_phases",
    "to_eroei_chart", "toy_two_well",
]
