"""Solver result models."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from peec.models.game import Dominance
from peec.models.plan import ObservationPlan

EQUAL_MANEUVERABILITY = "equal maneuverability"
OBSERVE_ALWAYS = "observation is free"


@dataclass(frozen=True)
class CESolution:
    """Nash observation strategies of the Concealment-Exposure game.

    ``F_table`` maps each enumerated N_p to F_p(N_p) and ``schedules`` maps it
    to the instants achieving that value. ``observe_always`` marks the Op = 0
    case, where the optimal plan observes continuously and has no finite list.
    """

    pursuer_plan: ObservationPlan
    evader_plan: ObservationPlan
    objective: float
    dominance: Dominance
    F_table: dict[int, float] = field(default_factory=dict)
    schedules: dict[int, tuple[float, ...]] = field(default_factory=dict)
    N_upper: int | None = None
    N_upper_tight: int | None = None
    first_order_residuals: tuple[float, ...] = ()
    observe_always: bool = False
    reason: str | None = None

    @property
    def fo_tol(self) -> float:
        return 1e-4 * (1.0 + abs(self.objective))


@dataclass(frozen=True)
class PeriodicSolution:
    """Optimal inter-sampling period of the infinite-horizon game.

    ``second_derivative`` is the curvature of the average cost at the root after
    the first-order condition is substituted, (1/dT) Tr[e^{A dT} CC' e^{A' dT} phi];
    ``second_derivative_full`` is the unsubstituted value.
    """

    dT_star: float
    avg_cost: float
    second_derivative: float
    second_derivative_full: float
    residual: float
    Op: float


@dataclass(frozen=True)
class CostBreakdown:
    """Expected game cost under Nash controls, split into its parts."""

    estimation_term: float
    obs_price_term: float
    baseline_term: float

    @property
    def total(self) -> float:
        return self.estimation_term + self.obs_price_term + self.baseline_term

    @property
    def observation_part(self) -> float:
        """Plan-dependent part (estimation term plus prices)."""
        return self.estimation_term + self.obs_price_term

    @property
    def full_information(self) -> float:
        """Cost of the full-information game, the observe-always limit."""
        return self.baseline_term


@dataclass(frozen=True)
class MonotonicityReport:
    """Estimation terms of a schedule and of a refinement (superset) of it."""

    coarse_term: float
    refined_term: float
    holds: bool
    strict: bool


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Closed-loop spectrum of the stationary game.

    ``sampled_radius`` is the spectral radius of e^{(A - D K~) h} for the
    reporting period h, the error-free part of the sampled-data map.
    """

    eigenvalues: NDArray[np.complex128]
    hurwitz: bool
    max_real_part: float
    period: float | None = None
    sampled_radius: float | None = None
