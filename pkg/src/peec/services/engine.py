"""Closed-loop simulation of the PEEC game.

Paths are advanced as x = x_hat + e. The estimate follows its linear ODE
dx_hat = (A - D K(t)) x_hat dt with RK4 steps; the estimation error follows
the Euler-Maruyama step e <- e + A e dt + C sqrt(dt) xi. Their sum is the state
of dx = Ax dt + Bp u_p dt - Be u_e dt + C dw under the Nash controls. At every
merged observation instant the estimate is reset to the state and e to zero.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from peec.models.game import GameSpec, Matrix
from peec.models.plan import COINCIDENT_TOL, ObservationPlan, merge_instants
from peec.models.trajectory import MonteCarloSummary, TrajectoryRecord
from peec.protocols.noise import NoiseSourceProtocol
from peec.services.ce_solver import price_term
from peec.services.lqg import RiccatiSolution, Vector
from peec.services.noise import PhiloxNoiseSource

logger = logging.getLogger(__name__)

Stack = NDArray[np.float64]

DEFAULT_SIM_STEPS = 6000
BATCH_SIZE = 200


def nash_controls(
    spec: GameSpec, riccati: RiccatiSolution, x_hat: Vector, t: float
) -> tuple[Vector, Vector]:
    """u_p = -Rp^-1 Bp' K(t) x_hat and u_e = -Re^-1 Be' K(t) x_hat."""
    Kx = riccati.K_at(t) @ np.asarray(x_hat, dtype=np.float64)
    u_p: Vector = -np.linalg.solve(spec.Rp, spec.Bp.T @ Kx)
    u_e: Vector = -np.linalg.solve(spec.Re, spec.Be.T @ Kx)
    return u_p, u_e


def _closed_loop(spec: GameSpec, riccati: RiccatiSolution, t: Vector) -> Stack:
    result: Stack = spec.A - riccati.gap @ riccati.K_many(t)
    return result


def _rk4_matrices(spec: GameSpec, riccati: RiccatiSolution, t: Vector, dt: Vector) -> Stack:
    """Matrices P_k with x_hat(t_k + dt_k) = P_k x_hat(t_k) for one RK4 step each."""
    n = spec.n
    eye = np.eye(n)
    M1 = _closed_loop(spec, riccati, t)
    M2 = _closed_loop(spec, riccati, t + 0.5 * dt)
    M4 = _closed_loop(spec, riccati, t + dt)
    h = dt[:, None, None]
    S1 = M1
    S2 = M2 @ (eye + 0.5 * h * S1)
    S3 = M2 @ (eye + 0.5 * h * S2)
    S4 = M4 @ (eye + h * S3)
    result: Stack = eye + (h / 6.0) * (S1 + 2.0 * S2 + 2.0 * S3 + S4)
    return result


def propagate_estimate(
    spec: GameSpec, riccati: RiccatiSolution, x_hat: Vector, t: float, dt: float
) -> Vector:
    """One RK4 step of dx_hat = (A - D K(t)) x_hat."""
    P = _rk4_matrices(spec, riccati, np.array([t]), np.array([dt]))[0]
    result: Vector = P @ np.asarray(x_hat, dtype=np.float64)
    return result


@dataclass(frozen=True)
class SimulationGrid:
    """Simulation nodes: a uniform grid with the merged instants spliced in."""

    times: Vector
    flags: NDArray[np.bool_]
    pursuer_counts: NDArray[np.int64]
    evader_counts: NDArray[np.int64]

    @property
    def n_steps(self) -> int:
        return int(self.times.size - 1)


def _matches(times: Vector, instants: tuple[float, ...], tol: float) -> NDArray[np.int64]:
    counts = np.zeros(times.size, dtype=np.int64)
    for t in instants:
        k = int(np.argmin(np.abs(times - t)))
        if abs(times[k] - t) <= tol:
            counts[k] += 1
    return counts


def simulation_grid(
    horizon: float, n_sim_steps: int, plan_p: ObservationPlan, plan_e: ObservationPlan
) -> SimulationGrid:
    """Uniform nodes plus every merged instant, each splitting its enclosing step.

    Instants within the coincidence tolerance of a node reuse that node.
    """
    if n_sim_steps < 1:
        raise ValueError(f"n_sim_steps must be positive, got {n_sim_steps}")
    tol = COINCIDENT_TOL * max(1.0, horizon)
    uniform = np.linspace(0.0, horizon, n_sim_steps + 1)
    merged = merge_instants(plan_p, plan_e, horizon=horizon)
    extra = [t for t in merged if np.min(np.abs(uniform - t)) > tol]
    times = np.sort(np.concatenate((uniform, np.array(extra, dtype=np.float64))))
    return SimulationGrid(
        times=times,
        flags=_matches(times, merged, tol) > 0,
        pursuer_counts=_matches(times, plan_p.instants, tol),
        evader_counts=_matches(times, plan_e.instants, tol),
    )


@dataclass(frozen=True)
class _Operators:
    """Per-step estimator maps and per-node control gains on a simulation grid."""

    P: Stack
    L_p: Stack
    L_e: Stack
    control_weight: Stack
    prices: Vector


def _operators(spec: GameSpec, riccati: RiccatiSolution, grid: SimulationGrid) -> _Operators:
    times = grid.times
    dt = np.diff(times)
    K = riccati.K_many(times)
    L_p = np.linalg.solve(spec.Rp, spec.Bp.T) @ K
    L_e = np.linalg.solve(spec.Re, spec.Be.T) @ K
    # u'R u terms as a quadratic form in x_hat
    weight = np.swapaxes(L_p, 1, 2) @ spec.Rp @ L_p - np.swapaxes(L_e, 1, 2) @ spec.Re @ L_e
    prices = np.array(
        [price_term(spec.Op, int(p)) - price_term(spec.Oe, int(e)) for p, e in zip(grid.pursuer_counts, grid.evader_counts)]
    )
    return _Operators(
        P=_rk4_matrices(spec, riccati, times[:-1], dt),
        L_p=L_p,
        L_e=L_e,
        control_weight=weight,
        prices=prices,
    )


def _quad(x: Stack, M: Matrix) -> Vector:
    result: Vector = np.einsum("bi,ij,bj->b", x, M, x)
    return result


NodeHook = Callable[[int, Stack, Stack, Vector], None]


def _run_batch(
    spec: GameSpec,
    grid: SimulationGrid,
    ops: _Operators,
    noise: Stack,
    on_node: NodeHook,
) -> Vector:
    """Advance a batch of paths; returns realized costs.

    ``noise`` has shape (B, n_steps, q). ``on_node(k, x, x_hat, cost)`` sees
    post-reset values at every node.
    """
    batch = noise.shape[0]
    A, C, Q = spec.A, spec.C, spec.Q
    times = grid.times
    x_hat = np.broadcast_to(spec.x0, (batch, spec.n)).copy()
    err = np.zeros((batch, spec.n))
    cost = np.zeros(batch)

    running = _quad(x_hat, Q) + _quad(x_hat, ops.control_weight[0])
    on_node(0, x_hat + err, x_hat, cost)
    for k in range(grid.n_steps):
        dt = times[k + 1] - times[k]
        x_hat = x_hat @ ops.P[k].T
        err = err + dt * (err @ A.T) + math.sqrt(dt) * (noise[:, k, :] @ C.T)
        x = x_hat + err
        right = _quad(x, Q) + _quad(x_hat, ops.control_weight[k + 1])
        cost = cost + 0.5 * dt * (running + right) + ops.prices[k + 1]
        if grid.flags[k + 1]:
            x_hat = x
            err = np.zeros_like(err)
            running = _quad(x, Q) + _quad(x_hat, ops.control_weight[k + 1])
        else:
            running = right
        on_node(k + 1, x, x_hat, cost)

    x_final = x_hat + err
    result: Vector = cost + _quad(x_final, spec.QT)
    return result


def simulate(
    spec: GameSpec,
    riccati: RiccatiSolution,
    plan_p: ObservationPlan,
    plan_e: ObservationPlan,
    seed: int,
    n_sim_steps: int = DEFAULT_SIM_STEPS,
    noise: NoiseSourceProtocol | None = None,
    path_index: int = 0,
) -> TrajectoryRecord:
    """Simulate one path of the closed-loop game.

    Args:
        spec: Validated game.
        riccati: Gains for the Nash controls and the estimator.
        plan_p: Pursuer observation plan.
        plan_e: Evader observation plan.
        seed: Base seed of the noise source.
        n_sim_steps: Uniform steps on [0, T] before instants are spliced in.
        noise: Noise source; defaults to Philox keyed by ``seed``.
        path_index: Path index within the seed's stream.

    Raises:
        InvalidPlanError: If a plan is not a valid schedule on (0, T).
    """
    plan_p = plan_p.validate(spec.T)
    plan_e = plan_e.validate(spec.T)
    source = noise if noise is not None else PhiloxNoiseSource(seed)
    grid = simulation_grid(spec.T, n_sim_steps, plan_p, plan_e)
    ops = _operators(spec, riccati, grid)
    xi = source.increments(path_index, grid.n_steps, spec.q)[None, :, :]

    nodes = grid.times.size
    xs = np.empty((nodes, spec.n))
    x_hats = np.empty((nodes, spec.n))
    costs = np.empty(nodes)

    def record(k: int, x: Stack, x_hat: Stack, cost: Vector) -> None:
        xs[k] = x[0]
        x_hats[k] = x_hat[0]
        costs[k] = cost[0]

    realized = _run_batch(spec, grid, ops, xi, record)
    u_p = -np.einsum("kij,kj->ki", ops.L_p, x_hats)
    u_e = -np.einsum("kij,kj->ki", ops.L_e, x_hats)
    return TrajectoryRecord(
        times=grid.times,
        x=xs,
        x_hat=x_hats,
        u_p=u_p,
        u_e=u_e,
        obs_flags=grid.flags,
        cost_to_date=costs,
        realized_cost=float(realized[0]),
        seed=source.seed,
    )


def monte_carlo(
    spec: GameSpec,
    riccati: RiccatiSolution,
    plan_p: ObservationPlan,
    plan_e: ObservationPlan,
    M: int,
    base_seed: int,
    n_sim_steps: int = DEFAULT_SIM_STEPS,
    noise: NoiseSourceProtocol | None = None,
    keep_costs: bool = False,
    batch_size: int = BATCH_SIZE,
) -> MonteCarloSummary:
    """Simulate M paths and summarize their realized costs and moments.

    Path k draws its noise from (base_seed, k) and paths are aggregated in
    index order, batch by batch.

    Raises:
        ValueError: If M < 2.
        InvalidPlanError: If a plan is not a valid schedule on (0, T).
    """
    if M < 2:
        raise ValueError(f"monte carlo needs at least 2 paths, got {M}")
    plan_p = plan_p.validate(spec.T)
    plan_e = plan_e.validate(spec.T)
    source = noise if noise is not None else PhiloxNoiseSource(base_seed)
    grid = simulation_grid(spec.T, n_sim_steps, plan_p, plan_e)
    ops = _operators(spec, riccati, grid)

    nodes, n = grid.times.size, spec.n
    sum_x = np.zeros((nodes, n))
    sum_sq = np.zeros(nodes)
    sum_err = np.zeros((nodes, n))
    sum_err2 = np.zeros((nodes, n, n))
    terminal = np.empty(M)
    costs = np.empty(M)

    def accumulate(k: int, x: Stack, x_hat: Stack, cost: Vector) -> None:
        err = x - x_hat
        sum_x[k] += x.sum(axis=0)
        sum_sq[k] += np.einsum("bi,bi->", x, x)
        sum_err[k] += err.sum(axis=0)
        sum_err2[k] += err.T @ err

    for start in range(0, M, batch_size):
        stop = min(M, start + batch_size)
        xi = np.stack([source.increments(p, grid.n_steps, spec.q) for p in range(start, stop)])
        final: dict[str, Stack] = {}

        def hook(k: int, x: Stack, x_hat: Stack, cost: Vector) -> None:
            accumulate(k, x, x_hat, cost)
            if k == grid.n_steps:
                final["x"] = x

        costs[start:stop] = _run_batch(spec, grid, ops, xi, hook)
        terminal[start:stop] = np.linalg.norm(final["x"], axis=1)
        logger.debug("Monte Carlo paths %d..%d done", start, stop - 1)

    std = float(np.std(costs, ddof=1))
    return MonteCarloSummary(
        M=M,
        mean_cost=float(np.mean(costs)),
        std_cost=std,
        ci95_halfwidth=1.96 * std / math.sqrt(M),
        mean_terminal_distance=float(np.mean(terminal)),
        times=grid.times,
        mean_state=sum_x / M,
        mean_sq_norm=sum_sq / M,
        mean_error=sum_err / M,
        error_second_moment=sum_err2 / M,
        costs=costs.copy() if keep_costs else None,
    )
