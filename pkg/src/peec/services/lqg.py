"""Continuous-time LQG numerics: Riccati solutions, Gramians and trace-cost quadrature.

Everything downstream (observation scheduling, simulation, closed-form costs)
consumes the three objects built here:

* ``RiccatiSolution``: K(t) on a uniform grid, linearly interpolated between
  nodes, and the source of phi(t) = K(t) D K(t).
* ``GramianCache``: Sigma(s) = int_0^s e^{Au} CC' e^{A'u} du and its derivative
  e^{As} CC' e^{A's}, served in batches from grid tables.
* ``trace_cost_integral``: int Tr[Sigma(t - tau0) phi(t)] dt by panel Simpson.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from peec.errors import (
    FiniteEscapeError,
    NoConvergenceError,
    NonFiniteEntryError,
    NotDominantSpecError,
    NotObservableError,
    OutOfRangeError,
)
from peec.models.game import Dominance, GameSpec, classify_dominance

logger = logging.getLogger(__name__)

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]

DEFAULT_RICCATI_STEPS = 4096
ESCAPE_NORM_CAP = 1e12
ALGEBRAIC_STEP = 1e-2
ALGEBRAIC_TOL = 1e-10
ALGEBRAIC_MAX_STEPS = 200_000
ALGEBRAIC_RESIDUAL_TOL = 1e-8

# Slack allowed on range checks, relative to the horizon.
RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = k * T / n_steps on [0, T]."""

    horizon: float
    n_steps: int = DEFAULT_RICCATI_STEPS

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be positive, got {self.n_steps}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")

    @property
    def step(self) -> float:
        return self.horizon / self.n_steps

    @property
    def nodes(self) -> Vector:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    def check(self, name: str, value: float, low: float = 0.0, high: float | None = None) -> float:
        """Clip ``value`` into [low, high] if it is within slack, else raise."""
        upper = self.horizon if high is None else high
        slack = RANGE_SLACK * max(1.0, self.horizon)
        if not (low - slack <= value <= upper + slack):
            raise OutOfRangeError(name, value, low, upper)
        return min(max(value, low), upper)


def matrix_exp(M: Matrix, t: float = 1.0) -> Matrix:
    """Return e^{Mt}.

    Raises:
        NonFiniteEntryError: If M or t has a non-finite entry.
    """
    arr = np.asarray(M, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or not math.isfinite(t):
        raise NonFiniteEntryError("matrix_exp argument")
    result: Matrix = scipy.linalg.expm(arr * t)
    return result


def van_loan_gramian(A: Matrix, W: Matrix, tau: float) -> Matrix:
    """int_0^tau e^{As} W e^{A's} ds from one block exponential.

    exp([[-A, W], [0, A']] tau) = [[., F12], [0, F22]] with F22 = e^{A' tau}
    and the integral equal to F22' F12.
    """
    n = A.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -A
    block[:n, n:] = W
    block[n:, n:] = A.T
    F = matrix_exp(block, tau)
    gram = F[n:, n:].T @ F[:n, n:]
    return 0.5 * (gram + gram.T)


def _linear_weights(grid: TimeGrid, t: Vector) -> tuple[NDArray[np.intp], Vector]:
    h = grid.step
    idx = np.clip(np.floor(t / h).astype(np.intp), 0, grid.n_steps - 1)
    w = np.clip((t - idx * h) / h, 0.0, 1.0)
    return idx, w


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    """K(t_k) on a grid (forward time order), the gap D, and optionally K~."""

    grid: TimeGrid
    K: NDArray[np.float64]
    gap: Matrix
    K_inf: Matrix | None = None

    @classmethod
    def stationary(cls, K_inf: Matrix, grid: TimeGrid, gap: Matrix) -> "RiccatiSolution":
        """Constant gain K(t) = K~ on every node (infinite-horizon controls)."""
        K = np.broadcast_to(K_inf, (grid.n_steps + 1, *K_inf.shape)).copy()
        return cls(grid=grid, K=K, gap=gap, K_inf=K_inf)

    def K_many(self, t: Vector) -> NDArray[np.float64]:
        """Linearly interpolated K at each time in ``t`` (shape (L, n, n))."""
        idx, w = _linear_weights(self.grid, np.asarray(t, dtype=np.float64))
        w3 = w[:, None, None]
        result: NDArray[np.float64] = (1.0 - w3) * self.K[idx] + w3 * self.K[idx + 1]
        return result

    def K_at(self, t: float) -> Matrix:
        t = self.grid.check("t", t)
        return self.K_many(np.array([t]))[0]

    def phi_many(self, t: Vector) -> NDArray[np.float64]:
        """phi(t) = K(t) D K(t) at each time in ``t``."""
        K = self.K_many(t)
        result: NDArray[np.float64] = K @ self.gap @ K
        return result


def _riccati_rhs(K: Matrix, A: Matrix, Q: Matrix, D: Matrix) -> Matrix:
    # dK/dtau for tau = T - t: Q + KA + A'K - K D K
    return Q + K @ A + A.T @ K - K @ D @ K


def _rk4_step(K: Matrix, h: float, A: Matrix, Q: Matrix, D: Matrix) -> Matrix:
    k1 = _riccati_rhs(K, A, Q, D)
    k2 = _riccati_rhs(K + 0.5 * h * k1, A, Q, D)
    k3 = _riccati_rhs(K + 0.5 * h * k2, A, Q, D)
    k4 = _riccati_rhs(K + h * k3, A, Q, D)
    K_next = K + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (K_next + K_next.T)


def solve_riccati_finite(spec: GameSpec, grid: TimeGrid) -> RiccatiSolution:
    """Integrate -dK/dt = Q + KA + A'K - K D K backward from K(T) = QT.

    Classical RK4 on the grid with symmetrization after each step.

    Raises:
        NotDominantSpecError: If the evader out-maneuvers the pursuer.
        FiniteEscapeError: If any node norm exceeds the escape cap.
    """
    dominance = classify_dominance(spec)
    if dominance.label is Dominance.NOT_DOMINANT:
        raise NotDominantSpecError()

    A, Q, D = spec.A, spec.Q, dominance.gap
    h = grid.step
    nodes = grid.nodes
    K = np.empty((grid.n_steps + 1, spec.n, spec.n))
    K[-1] = spec.QT
    for k in range(grid.n_steps, 0, -1):
        K_prev = _rk4_step(K[k], h, A, Q, D)
        norm = float(np.linalg.norm(K_prev, 2)) if np.all(np.isfinite(K_prev)) else math.inf
        if norm > ESCAPE_NORM_CAP:
            raise FiniteEscapeError(float(nodes[k - 1]), norm)
        K[k - 1] = K_prev

    logger.debug("Riccati solved on %d steps, |K(0)| = %.6g", grid.n_steps, np.linalg.norm(K[0], 2))
    return RiccatiSolution(grid=grid, K=K, gap=D)


def psd_sqrt(M: Matrix) -> Matrix:
    """Symmetric square root of a PSD matrix (negative eigenvalues clipped)."""
    vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
    root: Matrix = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return root


def observability_rank(A: Matrix, Q: Matrix) -> int:
    """Rank of the observability matrix of (A, Q^{1/2})."""
    S = psd_sqrt(Q)
    n = A.shape[0]
    blocks = [S]
    for _ in range(n - 1):
        blocks.append(blocks[-1] @ A)
    O = np.vstack(blocks)
    sv = np.linalg.svd(O, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > 1e-9 * max(1.0, float(sv[0]))))


def algebraic_residual(spec: GameSpec, K: Matrix, gap: Matrix | None = None) -> float:
    """Norm of Q + KA + A'K - K D K."""
    D = spec.gap if gap is None else gap
    return float(np.linalg.norm(_riccati_rhs(K, spec.A, spec.Q, D), 2))


def _is_hurwitz(M: Matrix, margin: float = 1e-9) -> bool:
    return bool(np.max(np.linalg.eigvals(M).real) < -margin)


def _newton_kleinman(spec: GameSpec, K: Matrix, D: Matrix, max_iter: int = 20) -> Matrix:
    best = K
    best_res = algebraic_residual(spec, K, D)
    for _ in range(max_iter):
        closed = spec.A - D @ K
        if not _is_hurwitz(closed):
            break
        # (A - DK)' K+ + K+ (A - DK) = -(Q + K D K)
        K = scipy.linalg.solve_continuous_lyapunov(closed.T, -(spec.Q + K @ D @ K))
        K = 0.5 * (K + K.T)
        res = algebraic_residual(spec, K, D)
        if res < best_res:
            best, best_res = K, res
        if res <= 1e-14 * (1.0 + float(np.linalg.norm(K, 2)) ** 2):
            break
    return best


def solve_riccati_algebraic(
    spec: GameSpec,
    step: float = ALGEBRAIC_STEP,
    tol: float = ALGEBRAIC_TOL,
    max_steps: int = ALGEBRAIC_MAX_STEPS,
    require_observable: bool = True,
) -> Matrix:
    """K~ solving Q + KA + A'K - K D K = 0, as the limit of the finite-horizon solution.

    The Riccati ODE is integrated backward from K = 0 until successive steps
    differ by less than ``tol``; the iterate is then polished with
    Newton-Kleinman steps.

    Raises:
        NotDominantSpecError: If the game is NotDominant.
        NotObservableError: If (A, Q^{1/2}) is unobservable and ``require_observable``.
        NoConvergenceError: If the step cap is reached or the residual stays large.
    """
    dominance = classify_dominance(spec)
    if dominance.label is Dominance.NOT_DOMINANT:
        raise NotDominantSpecError()
    if require_observable:
        rank = observability_rank(spec.A, spec.Q)
        if rank < spec.n:
            raise NotObservableError(rank, spec.n)

    A, Q, D = spec.A, spec.Q, dominance.gap
    K = np.zeros((spec.n, spec.n))
    for iteration in range(1, max_steps + 1):
        K_next = _rk4_step(K, step, A, Q, D)
        if not np.all(np.isfinite(K_next)) or np.linalg.norm(K_next, 2) > ESCAPE_NORM_CAP:
            raise NoConvergenceError("algebraic Riccati iteration", iteration)
        delta = float(np.linalg.norm(K_next - K, 2))
        K = K_next
        if delta < tol * max(1.0, float(np.linalg.norm(K, 2))):
            logger.debug("Algebraic Riccati converged after %d steps", iteration)
            break
    else:
        raise NoConvergenceError("algebraic Riccati iteration", max_steps)

    K = _newton_kleinman(spec, K, D)
    scale = 1.0 + float(np.linalg.norm(K, 2)) ** 2
    if algebraic_residual(spec, K, D) > ALGEBRAIC_RESIDUAL_TOL * scale:
        raise NoConvergenceError("algebraic Riccati residual", max_steps)
    return K


def gramian_tables(A: Matrix, W: Matrix, h: float, n_steps: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """e^{Amh} and Sigma(mh) for m = 0..n_steps by the one-step recurrence

    Sigma((m+1)h) = Sigma(mh) + e^{Amh} Sigma(h) e^{Amh}'.
    """
    n = A.shape[0]
    E_h = matrix_exp(A, h)
    S_h = van_loan_gramian(A, W, h)
    E = np.empty((n_steps + 1, n, n))
    S = np.empty((n_steps + 1, n, n))
    E[0] = np.eye(n)
    S[0] = 0.0
    for m in range(n_steps):
        E[m + 1] = E[m] @ E_h
        S_next = S[m] + E[m] @ S_h @ E[m].T
        S[m + 1] = 0.5 * (S_next + S_next.T)
    return E, S


class GramianCache:
    """Batched evaluator of Sigma(s) and e^{As} CC' e^{A's} for s in [0, T].

    Tables e^{Amh} and Sigma(mh) are built once; an arbitrary s = mh + r uses
    Sigma(mh + r) = Sigma(mh) + e^{Amh} Sigma(r) e^{Amh}' with one Van Loan
    exponential per distinct remainder r.
    """

    # Remainders are grouped after rounding r/h to this many decimals.
    _REMAINDER_DECIMALS = 10

    def __init__(self, spec: GameSpec, grid: TimeGrid) -> None:
        self.spec = spec
        self.grid = grid
        self.A = np.array(spec.A)
        self.W = spec.CCt
        self._E, self._S = gramian_tables(self.A, self.W, grid.step, grid.n_steps)

    def sigma(self, tau: float) -> Matrix:
        """Sigma(tau) from a single Van Loan exponential."""
        tau = self.grid.check("tau", tau)
        if tau == 0.0:
            return np.zeros_like(self.W)
        return van_loan_gramian(self.A, self.W, tau)

    def _decompose(self, s: Vector) -> tuple[NDArray[np.intp], Vector, NDArray[np.intp]]:
        h = self.grid.step
        slack = RANGE_SLACK * max(1.0, self.grid.horizon)
        if s.size and (s.min() < -slack or s.max() > self.grid.horizon + slack):
            bad = float(s.min() if s.min() < -slack else s.max())
            raise OutOfRangeError("s", bad, 0.0, self.grid.horizon)
        s = np.clip(s, 0.0, self.grid.horizon)
        m = np.clip(np.floor(s / h).astype(np.intp), 0, self.grid.n_steps)
        r = np.clip(s - m * h, 0.0, None)
        keys = np.round(r / h, self._REMAINDER_DECIMALS)
        unique, inverse = np.unique(keys, return_inverse=True)
        return m, unique * h, inverse.reshape(-1)

    def sigma_many(self, s: Vector) -> NDArray[np.float64]:
        """Sigma at each lag in ``s`` (shape (L, n, n))."""
        s = np.asarray(s, dtype=np.float64).reshape(-1)
        m, remainders, inverse = self._decompose(s)
        S_r = np.stack([van_loan_gramian(self.A, self.W, r) if r > 0 else np.zeros_like(self.W) for r in remainders])
        E = self._E[m]
        result: NDArray[np.float64] = self._S[m] + E @ S_r[inverse] @ np.swapaxes(E, 1, 2)
        return result

    def impulse_many(self, s: Vector) -> NDArray[np.float64]:
        """e^{As} CC' e^{A's} at each lag in ``s`` (the derivative of Sigma)."""
        s = np.asarray(s, dtype=np.float64).reshape(-1)
        m, remainders, inverse = self._decompose(s)
        G_r = []
        for r in remainders:
            E_r = matrix_exp(self.A, r)
            G_r.append(E_r @ self.W @ E_r.T)
        E = self._E[m] @ np.stack(G_r)[inverse]
        result: NDArray[np.float64] = E @ np.swapaxes(self._E[m], 1, 2)
        return result


def sigma(cache: GramianCache, tau: float) -> Matrix:
    """Sigma(tau) = int_0^tau e^{A(tau-s)} CC' e^{A(tau-s)'} ds."""
    return cache.sigma(tau)


def phi_at(riccati: RiccatiSolution, t: float) -> Matrix:
    """phi(t) = K(t) D K(t) with K linearly interpolated."""
    t = riccati.grid.check("t", t)
    return riccati.phi_many(np.array([t]))[0]


def trace_pair(S: NDArray[np.float64], P: NDArray[np.float64]) -> Vector:
    """Tr[S_k P_k] for stacks of symmetric matrices."""
    result: Vector = np.einsum("kij,kij->k", S, P)
    return result


def panel_points(grid: TimeGrid, a: float, b: float) -> Vector:
    """Break points of the quadrature panels on [a, b]: a, interior grid nodes, b."""
    if b <= a:
        return np.array([a])
    nodes = grid.nodes
    lo = int(np.searchsorted(nodes, a, side="right"))
    hi = int(np.searchsorted(nodes, b, side="left"))
    return np.concatenate(([a], nodes[lo:hi], [b]))


def panel_simpson(points: Vector, f: Callable[[Vector], Vector]) -> Vector:
    """Simpson value of each panel [points[j], points[j+1]] using its midpoint."""
    if points.size < 2:
        return np.zeros(0)
    left, right = points[:-1], points[1:]
    mid = 0.5 * (left + right)
    values = f(np.concatenate((points, mid)))
    f_nodes, f_mid = values[: points.size], values[points.size :]
    result: Vector = (right - left) / 6.0 * (f_nodes[:-1] + 4.0 * f_mid + f_nodes[1:])
    return result


def sigma_trace_integrand(
    cache: GramianCache, riccati: RiccatiSolution, tau0: float
) -> Callable[[Vector], Vector]:
    """t -> Tr[Sigma(t - tau0) phi(t)]."""

    def integrand(t: Vector) -> Vector:
        return trace_pair(cache.sigma_many(t - tau0), riccati.phi_many(t))

    return integrand


def impulse_trace_integrand(
    cache: GramianCache, riccati: RiccatiSolution, t_i: float
) -> Callable[[Vector], Vector]:
    """t -> Tr[e^{A(t - t_i)} CC' e^{A(t - t_i)'} phi(t)]."""

    def integrand(t: Vector) -> Vector:
        return trace_pair(cache.impulse_many(t - t_i), riccati.phi_many(t))

    return integrand


def trace_cost_integral(
    cache: GramianCache,
    riccati: RiccatiSolution,
    t_a: float,
    t_b: float,
    tau0: float,
) -> float:
    """int_{t_a}^{t_b} Tr[Sigma(t - tau0) phi(t)] dt.

    Panels follow the Riccati grid with the endpoints inserted; each panel is
    integrated by Simpson's rule with its own midpoint, where K is linearly
    interpolated. This is not composite Simpson over grid nodes, so an odd
    number of panels needs no trapezoid remainder. Splitting an interval at a
    grid node leaves the sum unchanged; splitting inside a panel changes it
    only by that panel's Simpson error.

    Raises:
        OutOfRangeError: Unless 0 <= tau0 <= t_a <= t_b <= T.
    """
    grid = riccati.grid
    tau0 = grid.check("tau0", tau0)
    t_a = grid.check("t_a", t_a, low=tau0)
    t_b = grid.check("t_b", t_b, low=t_a)
    if t_b == t_a:
        return 0.0
    points = panel_points(grid, t_a, t_b)
    return float(np.sum(panel_simpson(points, sigma_trace_integrand(cache, riccati, tau0))))
