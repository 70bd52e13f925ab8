"""Closed-form expected costs and closed-loop diagnostics."""

import numpy as np
import scipy.integrate
from numpy.typing import NDArray

from peec.errors import NotSubsetError
from peec.models.game import GameSpec, Matrix, classify_dominance
from peec.models.plan import COINCIDENT_TOL, ObservationPlan, merge_instants
from peec.models.solution import CostBreakdown, MonotonicityReport, StabilityReport
from peec.services.ce_solver import estimation_term, price_term
from peec.services.lqg import GramianCache, RiccatiSolution, Vector, matrix_exp

HURWITZ_MARGIN = 1e-9
MONOTONE_TOL = 1e-9


def baseline_cost(spec: GameSpec, riccati: RiccatiSolution) -> float:
    """|x0|^2_{K(0)} + int_0^T Tr(K(t) CC') dt (Simpson on the Riccati grid)."""
    traces = np.einsum("kij,ji->k", riccati.K, spec.CCt)
    integral = float(scipy.integrate.simpson(traces, x=riccati.grid.nodes))
    return float(spec.x0 @ riccati.K[0] @ spec.x0) + integral


def expected_cost(
    spec: GameSpec,
    cache: GramianCache,
    riccati: RiccatiSolution,
    plan_p: ObservationPlan,
    plan_e: ObservationPlan,
) -> CostBreakdown:
    """Expected game cost under the Nash controls for given observation plans.

    Raises:
        InvalidPlanError: If a plan is not a valid schedule on (0, T).
    """
    plan_p = plan_p.validate(spec.T)
    plan_e = plan_e.validate(spec.T)
    merged = merge_instants(plan_p, plan_e, horizon=spec.T)
    return CostBreakdown(
        estimation_term=estimation_term(cache, riccati, merged),
        obs_price_term=price_term(spec.Op, plan_p.N) - price_term(spec.Oe, plan_e.N),
        baseline_term=baseline_cost(spec, riccati),
    )


def observation_cost(
    spec: GameSpec,
    cache: GramianCache,
    riccati: RiccatiSolution,
    plan_p: ObservationPlan,
    plan_e: ObservationPlan,
) -> float:
    """Plan-dependent part of the expected cost: estimation term plus prices."""
    plan_p = plan_p.validate(spec.T)
    plan_e = plan_e.validate(spec.T)
    merged = merge_instants(plan_p, plan_e, horizon=spec.T)
    return estimation_term(cache, riccati, merged) + price_term(spec.Op, plan_p.N) - price_term(spec.Oe, plan_e.N)


def closed_loop_eigs(spec: GameSpec, K_inf: Matrix, period: float | None = None) -> StabilityReport:
    """Spectrum of A - D K~ and, for a period h, the radius of e^{(A - D K~) h}."""
    gap = classify_dominance(spec).gap
    closed = spec.A - gap @ K_inf
    eigs = np.linalg.eigvals(closed)
    max_real = float(np.max(eigs.real))
    radius = None
    if period is not None:
        radius = float(np.max(np.abs(np.linalg.eigvals(matrix_exp(closed, period)))))
    return StabilityReport(
        eigenvalues=eigs,
        hurwitz=max_real < -HURWITZ_MARGIN,
        max_real_part=max_real,
        period=period,
        sampled_radius=radius,
    )


def monotonicity_check(
    spec: GameSpec,
    cache: GramianCache,
    riccati: RiccatiSolution,
    coarse: tuple[float, ...],
    refined: tuple[float, ...],
) -> MonotonicityReport:
    """Compare the estimation term of a schedule with that of a superset of it.

    Raises:
        NotSubsetError: If an instant of ``coarse`` is missing from ``refined``.
        InvalidPlanError: If either set is not a valid schedule.
    """
    small = ObservationPlan.from_instants(coarse, spec.T)
    large = ObservationPlan.from_instants(refined, spec.T)
    tol = COINCIDENT_TOL * max(1.0, spec.T)
    superset = np.array(large.instants)
    for t in small.instants:
        if superset.size == 0 or np.min(np.abs(superset - t)) > tol:
            raise NotSubsetError(t)

    coarse_term = estimation_term(cache, riccati, small.instants)
    refined_term = estimation_term(cache, riccati, large.instants)
    slack = MONOTONE_TOL * max(1.0, abs(coarse_term))
    return MonotonicityReport(
        coarse_term=coarse_term,
        refined_term=refined_term,
        holds=refined_term <= coarse_term + slack,
        strict=refined_term < coarse_term,
    )


def error_variance(
    cache: GramianCache,
    plan_p: ObservationPlan,
    plan_e: ObservationPlan,
    times: Vector,
) -> NDArray[np.float64]:
    """Estimation-error covariance Sigma(t - tau(t)), tau(t) the last merged instant <= t."""
    horizon = cache.grid.horizon
    merged = np.array((0.0, *merge_instants(plan_p, plan_e, horizon=horizon)))
    t = np.asarray(times, dtype=np.float64)
    last = merged[np.searchsorted(merged, t, side="right") - 1]
    return cache.sigma_many(t - last)


def evader_gain(
    spec: GameSpec,
    cache: GramianCache,
    riccati: RiccatiSolution,
    plan_p: ObservationPlan,
    instant: float,
) -> float:
    """Change in the evader's objective from adding one observation at ``instant``.

    Positive values mean the deviation pays off for the evader (who maximizes).
    """
    base = observation_cost(spec, cache, riccati, plan_p, ObservationPlan.empty())
    deviated = observation_cost(spec, cache, riccati, plan_p, ObservationPlan.from_instants([instant], spec.T))
    return deviated - base
