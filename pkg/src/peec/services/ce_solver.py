"""Concealment-Exposure observation game.

Under maneuverability dominance the evader never observes, so solving the
game means choosing the pursuer's schedule: for each candidate count N_p the
instants follow from the first-order chain

    Tr[Sigma(t_i - t_{i-1}) phi(t_i)] = int_{t_i}^{t_{i+1}} Tr[e^{A(t-t_i)} CC' e^{A(t-t_i)'} phi(t)] dt

with the first instant found by bisection, and N_p is enumerated upward until
the price bound rules out larger counts.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.optimize

from peec.errors import (
    ChainBrokenError,
    InvalidPlanError,
    NoBracketError,
    NotDominantSpecError,
    ZeroCostError,
)
from peec.models.game import Dominance, GameSpec, Matrix, classify_dominance
from peec.models.plan import COINCIDENT_TOL, ObservationPlan
from peec.models.solution import (
    EQUAL_MANEUVERABILITY,
    OBSERVE_ALWAYS,
    CESolution,
    PeriodicSolution,
)
from peec.services.lqg import (
    GramianCache,
    RiccatiSolution,
    gramian_tables,
    impulse_trace_integrand,
    panel_points,
    panel_simpson,
    phi_at,
    trace_cost_integral,
)

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-5
TIE_TOL = 1e-9
MIN_SCAN_PANELS = 16
PERIOD_PANELS = 512
MAX_BRACKET_DOUBLINGS = 64


@dataclass(frozen=True)
class SearchTolerances:
    """Outer bisection width, inner root tolerance and chain-end slack."""

    eps: float
    eps_inner: float
    eps_terminal: float

    @classmethod
    def for_horizon(cls, horizon: float, base: float = DEFAULT_EPS) -> "SearchTolerances":
        eps = base * max(1.0, horizon)
        return cls(eps=eps, eps_inner=eps / 10.0, eps_terminal=10.0 * eps)


def price_term(price: float, count: int) -> float:
    """price * count, with no observations costing nothing even at price inf."""
    return 0.0 if count == 0 else price * count


def lhs_lp(cache: GramianCache, riccati: RiccatiSolution, t_prev: float, t_i: float) -> float:
    """Left side of the first-order condition, Tr[Sigma(t_i - t_prev) phi(t_i)]."""
    grid = riccati.grid
    t_prev = grid.check("t_prev", t_prev)
    t_i = grid.check("t_i", t_i, low=t_prev)
    if t_i == t_prev:
        return 0.0
    S = cache.sigma(t_i - t_prev)
    return float(np.trace(S @ phi_at(riccati, t_i)))


def rhs_rp(cache: GramianCache, riccati: RiccatiSolution, t_i: float, t_end: float) -> float:
    """Right side of the first-order condition integrated from t_i to t_end."""
    grid = riccati.grid
    t_i = grid.check("t_i", t_i)
    t_end = grid.check("t_end", t_end, low=t_i)
    if t_end == t_i:
        return 0.0
    points = panel_points(grid, t_i, t_end)
    return float(np.sum(panel_simpson(points, impulse_trace_integrand(cache, riccati, t_i))))


def _quadratic_integral(s: float, fa: float, fm: float, fb: float) -> float:
    # Integral over [0, s] (in panel units) of the quadratic through (0, fa), (1/2, fm), (1, fb).
    b1 = -3.0 * fa + 4.0 * fm - fb
    b2 = 2.0 * fa - 4.0 * fm + 2.0 * fb
    return s * (fa + s * (b1 / 2.0 + s * b2 / 3.0))


def _root_in_panel(a: float, b: float, fa: float, fm: float, fb: float, remaining: float, tol: float) -> float:
    width = b - a
    if width <= 0.0:
        return b

    def excess(s: float) -> float:
        return width * _quadratic_integral(s, fa, fm, fb) - remaining

    if excess(1.0) <= 0.0:
        return b
    if excess(0.0) >= 0.0:
        return a
    s = scipy.optimize.bisect(excess, 0.0, 1.0, xtol=max(tol / width, 1e-15))
    return a + float(s) * width


def next_instant(
    cache: GramianCache,
    riccati: RiccatiSolution,
    t_prev: float,
    t_i: float,
    eps_inner: float | None = None,
) -> float | None:
    """The t_next in (t_i, T] solving rhs_rp(t_i, t_next) = lhs_lp(t_prev, t_i).

    The integrand is accumulated panel by panel in growing chunks until it
    reaches the target; the crossing panel is then bisected on its Simpson
    interpolant.

    Returns:
        The next instant, or None if rhs_rp(t_i, T) < lhs_lp(t_prev, t_i).
    """
    grid = riccati.grid
    horizon = grid.horizon
    target = lhs_lp(cache, riccati, t_prev, t_i)
    if target <= 0.0:
        return t_i
    if t_i >= horizon:
        return None
    tol = SearchTolerances.for_horizon(horizon).eps_inner if eps_inner is None else eps_inner

    integrand = impulse_trace_integrand(cache, riccati, t_i)
    points = panel_points(grid, t_i, horizon)
    n_panels = points.size - 1
    chunk = max(MIN_SCAN_PANELS, int(1.25 * (t_i - t_prev) / grid.step) + 8)
    start = 0
    total = 0.0
    while start < n_panels:
        stop = min(n_panels, start + chunk)
        nodes = points[start : stop + 1]
        left, right = nodes[:-1], nodes[1:]
        values = integrand(np.concatenate((nodes, 0.5 * (left + right))))
        f_nodes, f_mid = values[: nodes.size], values[nodes.size :]
        panels = (right - left) / 6.0 * (f_nodes[:-1] + 4.0 * f_mid + f_nodes[1:])
        cumulative = total + np.cumsum(panels)
        crossed = np.nonzero(cumulative >= target)[0]
        if crossed.size:
            j = int(crossed[0])
            before = total if j == 0 else float(cumulative[j - 1])
            return _root_in_panel(
                float(left[j]),
                float(right[j]),
                float(f_nodes[j]),
                float(f_mid[j]),
                float(f_nodes[j + 1]),
                target - before,
                tol,
            )
        total = float(cumulative[-1])
        start = stop
        chunk *= 2
    return None


def _chain(
    cache: GramianCache, riccati: RiccatiSolution, t1: float, n_obs: int, eps_inner: float
) -> tuple[list[float], float] | None:
    """Chain n_obs instants from t1; returns (instants, t_{N+1}) or None if a step fails.

    An intermediate instant landing on T also fails the step: observations
    must lie strictly inside (0, T).
    """
    horizon = riccati.grid.horizon
    last_interior = horizon - COINCIDENT_TOL * max(1.0, horizon)
    instants = [t1]
    t_prev = 0.0
    for i in range(n_obs):
        t_next = next_instant(cache, riccati, t_prev, instants[-1], eps_inner)
        if t_next is None:
            return None
        if i == n_obs - 1:
            return instants, t_next
        if t_next >= last_interior:
            return None
        t_prev = instants[-1]
        instants.append(t_next)
    return None


def binary_search_instants(
    cache: GramianCache,
    riccati: RiccatiSolution,
    N_p: int,
    eps: float | None = None,
) -> tuple[float, ...]:
    """Optimal instants for a fixed count N_p by bisection on the first instant.

    A guess t_1 is too large when some chained step cannot be matched before T,
    and too small when the chain ends before T - eps_terminal.

    Raises:
        ValueError: If N_p < 1.
        ChainBrokenError: If no guess ever yields a complete chain.
    """
    if N_p < 1:
        raise ValueError(f"N_p must be at least 1, got {N_p}")
    horizon = riccati.grid.horizon
    tol = SearchTolerances.for_horizon(horizon)
    if eps is not None:
        tol = SearchTolerances(eps=eps, eps_inner=eps / 10.0, eps_terminal=10.0 * eps)

    t_low, t_up = 0.0, horizon
    fallback: list[float] | None = None
    max_iter = math.ceil(math.log2(horizon / tol.eps)) + 2
    for _ in range(max_iter):
        if t_up - t_low <= tol.eps:
            break
        t1 = 0.5 * (t_low + t_up)
        chained = _chain(cache, riccati, t1, N_p, tol.eps_inner)
        if chained is None:
            t_up = t1
            continue
        instants, t_end = chained
        fallback = instants
        if t_end < horizon - tol.eps_terminal:
            t_low = t1
        else:
            t_low = t_up = t1

    final = _chain(cache, riccati, 0.5 * (t_low + t_up), N_p, tol.eps_inner)
    if final is not None:
        return tuple(final[0])
    if fallback is None:
        raise ChainBrokenError(N_p)
    return tuple(fallback)


def estimation_term(cache: GramianCache, riccati: RiccatiSolution, instants: Sequence[float]) -> float:
    """Sum over the gaps of int Tr[Sigma(t - t_k) phi(t)] dt, with t_0 = 0, t_{N+1} = T."""
    horizon = riccati.grid.horizon
    bounds = [0.0, *instants, horizon]
    return sum(
        trace_cost_integral(cache, riccati, bounds[k], bounds[k + 1], bounds[k])
        for k in range(len(bounds) - 1)
    )


def objective_F(
    cache: GramianCache,
    riccati: RiccatiSolution,
    instants: Sequence[float],
    Op: float,
) -> float:
    """F_p for a schedule: the gap-wise estimation cost plus Op * N."""
    plan = ObservationPlan.from_instants(instants, riccati.grid.horizon)
    return estimation_term(cache, riccati, plan.instants) + price_term(Op, plan.N)


def first_order_residuals(
    cache: GramianCache, riccati: RiccatiSolution, instants: Sequence[float]
) -> tuple[float, ...]:
    """|lhs_lp(t_{i-1}, t_i) - rhs_rp(t_i, t_{i+1})| at every instant."""
    bounds = [0.0, *instants, riccati.grid.horizon]
    return tuple(
        abs(lhs_lp(cache, riccati, bounds[i - 1], bounds[i]) - rhs_rp(cache, riccati, bounds[i], bounds[i + 1]))
        for i in range(1, len(bounds) - 1)
    )


def _floor_ratio(value: float, price: float) -> int:
    return int(math.floor(value / price * (1.0 + 1e-12)))


def np_upper_bound(
    cache: GramianCache,
    riccati: RiccatiSolution,
    Op: float,
    F_table: dict[int, float] | None = None,
) -> tuple[int, int]:
    """Upper bounds on the optimal observation count.

    N_upper = floor(int_0^T Tr[Sigma(t) phi(t)] dt / Op). Every computed F_p(k)
    gives N_p* <= k + floor((F_p(k) - k Op) / Op); the tight bound is the
    smallest of these and N_upper.

    Raises:
        ZeroCostError: If Op is zero.
    """
    if Op == 0.0:
        raise ZeroCostError()
    if math.isinf(Op):
        return 0, 0
    table = F_table or {}
    baseline = table.get(0)
    if baseline is None:
        baseline = trace_cost_integral(cache, riccati, 0.0, riccati.grid.horizon, 0.0)
    n_upper = _floor_ratio(baseline, Op)
    tight = n_upper
    for k, value in table.items():
        # k + floor((F(k) - k Op) / Op) == floor(F(k) / Op)
        tight = min(tight, _floor_ratio(value, Op))
    return n_upper, max(tight, 0)


def _argmin_with_ties(table: dict[int, float]) -> int:
    best = min(table.values())
    slack = TIE_TOL * max(1.0, abs(best))
    return min(k for k, value in table.items() if value <= best + slack)


def solve_ce_game(
    spec: GameSpec,
    cache: GramianCache,
    riccati: RiccatiSolution,
    eps: float = DEFAULT_EPS,
) -> CESolution:
    """Nash observation strategies of both players.

    Under pursuer dominance the evader plan is empty and N_p = 0, 1, 2, ... is
    enumerated while N_p stays within the tightening bound and its chain still
    fits inside (0, T). Equal maneuverability gives two empty plans; a free
    pursuer observation gives the observe-always flag.

    Raises:
        NotDominantSpecError: If the evader out-maneuvers the pursuer.
        ChainBrokenError: If not even a single instant can be placed.
    """
    dominance = classify_dominance(spec)
    if dominance.label is Dominance.NOT_DOMINANT:
        raise NotDominantSpecError()
    if dominance.label is Dominance.EQUAL:
        return CESolution(
            pursuer_plan=ObservationPlan.empty(),
            evader_plan=ObservationPlan.empty(),
            objective=0.0,
            dominance=dominance.label,
            F_table={0: 0.0},
            schedules={0: ()},
            N_upper=0,
            N_upper_tight=0,
            reason=EQUAL_MANEUVERABILITY,
        )

    horizon = spec.T
    baseline = trace_cost_integral(cache, riccati, 0.0, horizon, 0.0)
    if spec.Op == 0.0:
        return CESolution(
            pursuer_plan=ObservationPlan.empty(),
            evader_plan=ObservationPlan.empty(),
            objective=0.0,
            dominance=dominance.label,
            F_table={0: baseline},
            schedules={0: ()},
            observe_always=True,
            reason=OBSERVE_ALWAYS,
        )

    table: dict[int, float] = {0: baseline}
    schedules: dict[int, tuple[float, ...]] = {0: ()}
    n_upper, tight = np_upper_bound(cache, riccati, spec.Op, table)
    n_obs = 1
    while n_obs <= tight:
        try:
            raw = binary_search_instants(cache, riccati, n_obs, eps=eps * max(1.0, horizon))
        except ChainBrokenError:
            if n_obs == 1:
                raise
            # no room for n_obs interior instants, nor for any larger count
            logger.debug("N_p=%d does not fit inside the horizon; stopping", n_obs)
            break
        plan = ObservationPlan.from_instants(raw, horizon)
        table[n_obs] = objective_F(cache, riccati, plan.instants, spec.Op)
        schedules[n_obs] = plan.instants
        tight = min(tight, _floor_ratio(table[n_obs], spec.Op))
        logger.debug("N_p=%d F=%.10g bound=%d", n_obs, table[n_obs], tight)
        n_obs += 1

    best = _argmin_with_ties(table)
    instants = schedules[best]
    return CESolution(
        pursuer_plan=ObservationPlan(instants),
        evader_plan=ObservationPlan.empty(),
        objective=table[best],
        dominance=dominance.label,
        F_table=table,
        schedules=schedules,
        N_upper=n_upper,
        N_upper_tight=max(tight, best),
        first_order_residuals=first_order_residuals(cache, riccati, instants),
    )


def _period_terms(A: Matrix, W: Matrix, phi: Matrix, dT: float) -> tuple[float, float, float]:
    """(int_0^dT Tr[Sigma phi], Tr[Sigma(dT) phi], Tr[e^{A dT} W e^{A' dT} phi])."""
    if dT <= 0.0:
        return 0.0, 0.0, float(np.trace(W @ phi))
    n_points = 2 * PERIOD_PANELS
    E, S = gramian_tables(A, W, dT / n_points, n_points)
    values = np.einsum("kij,ij->k", S, phi)
    integral = float(scipy.integrate.simpson(values, dx=dT / n_points))
    impulse = E[-1] @ W @ E[-1].T
    return integral, float(values[-1]), float(np.trace(impulse @ phi))


def _stationary_phi(spec: GameSpec, K_inf: Matrix) -> Matrix:
    dominance = classify_dominance(spec)
    if dominance.label is Dominance.NOT_DOMINANT:
        raise NotDominantSpecError()
    phi: Matrix = K_inf @ dominance.gap @ K_inf
    return 0.5 * (phi + phi.T)


def period_objective(spec: GameSpec, K_inf: Matrix, dT: float, Op: float) -> float:
    """Average cost per unit time of observing every dT: (int_0^dT Tr[Sigma phi] + Op) / dT."""
    if not dT > 0.0:
        raise InvalidPlanError(f"period must be positive, got {dT}")
    integral, _, _ = _period_terms(np.asarray(spec.A), spec.CCt, _stationary_phi(spec, K_inf), dT)
    return (integral + Op) / dT


def periodic_period(spec: GameSpec, K_inf: Matrix, Op: float) -> PeriodicSolution:
    """Optimal inter-sampling period of the infinite-horizon game.

    Solves g(dT) = dT Tr[Sigma(dT) phi] - int_0^dT Tr[Sigma(t) phi] dt - Op = 0
    by bisection after doubling the bracket until g changes sign.

    Raises:
        ZeroCostError: If Op is zero.
        NoBracketError: If g never becomes positive (or Op is infinite).
    """
    if Op == 0.0:
        raise ZeroCostError()
    if math.isinf(Op):
        raise NoBracketError(math.inf)
    A = np.asarray(spec.A)
    W = spec.CCt
    phi = _stationary_phi(spec, K_inf)

    def condition(dT: float) -> float:
        integral, at_end, _ = _period_terms(A, W, phi, dT)
        return dT * at_end - integral - Op

    upper = 1.0
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if condition(upper) > 0.0:
            break
        upper *= 2.0
    else:
        raise NoBracketError(upper)

    root = float(scipy.optimize.bisect(condition, 0.0, upper, xtol=1e-13 * upper, maxiter=400))
    integral, at_end, impulse = _period_terms(A, W, phi, root)
    avg = (integral + Op) / root
    full = impulse / root - 2.0 * at_end / root**2 + 2.0 * (integral + Op) / root**3
    logger.debug("Periodic period %.10g (avg cost %.10g)", root, avg)
    return PeriodicSolution(
        dT_star=root,
        avg_cost=avg,
        second_derivative=impulse / root,
        second_derivative_full=full,
        residual=abs(root * at_end - integral - Op),
        Op=Op,
    )


def periodic_plan(dT: float, horizon: float) -> ObservationPlan:
    """Observe every dT: instants {i dT : 0 < i dT < horizon}."""
    if not (math.isfinite(dT) and dT > 0.0):
        raise InvalidPlanError(f"period must be positive and finite, got {dT}")
    slack = 1e-12 * max(1.0, horizon)
    count = math.ceil(horizon / dT) + 1
    instants: list[float] = [i * dT for i in range(1, count) if i * dT < horizon - slack]
    return ObservationPlan.from_instants(instants, horizon)
