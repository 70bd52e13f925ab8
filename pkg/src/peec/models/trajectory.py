"""Simulation output models."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

Array = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """One simulated path sampled on the simulation grid.

    Rows follow ``times``; ``obs_flags`` is True at merged observation instants,
    where ``x_hat`` equals ``x``. ``cost_to_date`` is the running integral cost
    plus the price of the observations made so far; its last entry plus the
    terminal penalty is ``realized_cost``.
    """

    times: Array
    x: Array
    x_hat: Array
    u_p: Array
    u_e: Array
    obs_flags: NDArray[np.bool_]
    cost_to_date: Array
    realized_cost: float
    seed: int

    @property
    def n(self) -> int:
        return int(self.x.shape[1])

    @property
    def error(self) -> Array:
        result: Array = self.x - self.x_hat
        return result


@dataclass(frozen=True, eq=False)
class MonteCarloSummary:
    """Aggregate statistics of M simulated paths.

    ``mean_state``, ``mean_sq_norm``, ``mean_error`` and ``error_second_moment``
    are per-time moments on ``times`` (the error moment is E[e e'] per node).
    """

    M: int
    mean_cost: float
    std_cost: float
    ci95_halfwidth: float
    mean_terminal_distance: float
    times: Array
    mean_state: Array
    mean_sq_norm: Array
    mean_error: Array
    error_second_moment: Array
    costs: Array | None = None
