"""Domain models for PEEC."""

from peec.models.builders import planar_double_integrator, relative_game, stacked_game
from peec.models.config import Experiment, Numerics, RunConfig, Sweep
from peec.models.game import (
    Dominance,
    DominanceClass,
    GameSpec,
    classify_dominance,
    validate_spec,
)
from peec.models.plan import ObservationPlan, merge_instants
from peec.models.solution import (
    CESolution,
    CostBreakdown,
    MonotonicityReport,
    PeriodicSolution,
    StabilityReport,
)
from peec.models.trajectory import MonteCarloSummary, TrajectoryRecord

__all__ = [
    "CESolution",
    "CostBreakdown",
    "Dominance",
    "DominanceClass",
    "Experiment",
    "GameSpec",
    "MonotonicityReport",
    "MonteCarloSummary",
    "Numerics",
    "ObservationPlan",
    "PeriodicSolution",
    "RunConfig",
    "StabilityReport",
    "Sweep",
    "TrajectoryRecord",
    "classify_dominance",
    "merge_instants",
    "planar_double_integrator",
    "relative_game",
    "stacked_game",
    "validate_spec",
]
