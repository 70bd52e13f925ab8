"""Observation plan model."""

import math
from collections.abc import Iterable
from dataclasses import dataclass

from peec.errors import InvalidPlanError

# Instants closer than this (relative to the horizon) are one observation.
COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class ObservationPlan:
    """A player's observation schedule (N, {t_1 < ... < t_N}) inside (0, T)."""

    instants: tuple[float, ...] = ()

    @property
    def N(self) -> int:
        return len(self.instants)

    @classmethod
    def empty(cls) -> "ObservationPlan":
        return cls(())

    @classmethod
    def from_instants(cls, instants: Iterable[float], horizon: float) -> "ObservationPlan":
        """Build a plan, sorting and collapsing coincident instants.

        Args:
            instants: Observation times in any order.
            horizon: Game horizon T.

        Returns:
            Plan with strictly increasing instants.

        Raises:
            InvalidPlanError: If an instant is not finite or not inside (0, T).
        """
        values = sorted(float(t) for t in instants)
        for t in values:
            if not math.isfinite(t):
                raise InvalidPlanError(f"non-finite instant {t}")
            if not 0.0 < t < horizon:
                raise InvalidPlanError(f"instant {t:.12g} is not inside (0, {horizon:.12g})")
        return cls(tuple(_collapse(values, horizon)))

    def validate(self, horizon: float) -> "ObservationPlan":
        """Re-check the plan against a horizon."""
        checked = ObservationPlan.from_instants(self.instants, horizon)
        if checked.N != self.N:
            raise InvalidPlanError("coincident instants")
        return checked


def _collapse(sorted_values: list[float], horizon: float) -> list[float]:
    tol = COINCIDENT_TOL * max(1.0, horizon)
    out: list[float] = []
    for t in sorted_values:
        if out and t - out[-1] <= tol:
            continue
        out.append(t)
    return out


def merge_instants(*plans: ObservationPlan, horizon: float) -> tuple[float, ...]:
    """Ordered union T = T_p ∪ T_e with coincident instants collapsed."""
    values = sorted(t for plan in plans for t in plan.instants)
    return tuple(_collapse(values, horizon))
