"""Unit tests for closed-form costs and diagnostics."""

import functools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dev.games import scalar_game
from peec.errors import NotSubsetError
from peec.models.builders import planar_double_integrator
from peec.models.game import GameSpec, Matrix
from peec.models.plan import ObservationPlan
from peec.models.solution import MonotonicityReport, StabilityReport
from peec.services.analysis import (
    baseline_cost,
    closed_loop_eigs,
    error_variance,
    evader_gain,
    expected_cost,
    monotonicity_check,
    observation_cost,
)
from peec.services.ce_solver import estimation_term
from peec.services.lqg import GramianCache, RiccatiSolution, TimeGrid, solve_riccati_algebraic, solve_riccati_finite

EMPTY = ObservationPlan.empty()


@functools.cache
def _planar_stationary() -> tuple[GameSpec, Matrix]:
    spec = planar_double_integrator(Op=900.0)
    return spec, solve_riccati_algebraic(spec)


class TestExpectedCost:
    """Tests for the closed-form expected cost."""

    def test_baseline_closed_form(self, scalar_spec: GameSpec, scalar_riccati: RiccatiSolution) -> None:
        """Test x0' K(0) x0 + int Tr(K CC') = 1/2 + ln 2."""
        assert baseline_cost(scalar_spec, scalar_riccati) == pytest.approx(0.5 + math.log(2.0), rel=1e-9)

    def test_blind_cost_closed_form(
        self, scalar_spec: GameSpec, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution
    ) -> None:
        """Test the blind scalar game costs 1/2 + ln 2 + (1 - ln 2) = 3/2."""
        cost = expected_cost(scalar_spec, scalar_cache, scalar_riccati, EMPTY, EMPTY)

        assert cost.total == pytest.approx(1.5, rel=1e-5)
        assert cost.obs_price_term == 0.0
        assert cost.full_information == cost.baseline_term

    def test_prices_counted(
        self, scalar_spec: GameSpec, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution
    ) -> None:
        """Test the pursuer pays Op per observation and the evader Oe."""
        spec = scalar_spec.with_updates(Op=0.05, Oe=0.02)
        plan_p = ObservationPlan.from_instants([0.3, 0.6], horizon=1.0)
        plan_e = ObservationPlan.from_instants([0.6], horizon=1.0)

        cost = expected_cost(spec, scalar_cache, scalar_riccati, plan_p, plan_e)

        assert cost.obs_price_term == pytest.approx(2 * 0.05 - 0.02)
        assert cost.estimation_term == pytest.approx(estimation_term(scalar_cache, scalar_riccati, [0.3, 0.6]))
        assert cost.observation_part == pytest.approx(
            observation_cost(spec, scalar_cache, scalar_riccati, plan_p, plan_e)
        )

    def test_baseline_ignores_plans(
        self, planar_spec: GameSpec, planar_cache: GramianCache, planar_riccati: RiccatiSolution
    ) -> None:
        """Test the full-information part is the same for every pair of plans."""
        plans = (
            (EMPTY, EMPTY),
            (ObservationPlan.from_instants([2.0, 4.0], horizon=6.0), EMPTY),
            (ObservationPlan.from_instants([1.0], horizon=6.0), ObservationPlan.from_instants([3.5], horizon=6.0)),
        )

        baselines = {
            expected_cost(planar_spec, planar_cache, planar_riccati, plan_p, plan_e).baseline_term
            for plan_p, plan_e in plans
        }

        assert baselines == {baseline_cost(planar_spec, planar_riccati)}


class TestClosedLoopEigs:
    """Tests for closed_loop_eigs."""

    def test_scalar(self) -> None:
        """Test A - D K~ = -sqrt(2) and its sampled radius."""
        spec = scalar_game(q=2.0)
        K_inf = solve_riccati_algebraic(spec)

        report = closed_loop_eigs(spec, K_inf, period=0.5)

        assert report.hurwitz
        assert report.max_real_part == pytest.approx(-math.sqrt(2.0), rel=1e-9)
        assert report.sampled_radius == pytest.approx(math.exp(-0.5 * math.sqrt(2.0)), rel=1e-9)

    def test_planar_is_hurwitz(self, planar_spec: GameSpec) -> None:
        """Test the planar stationary closed loop is stable."""
        report = closed_loop_eigs(planar_spec, solve_riccati_algebraic(planar_spec), period=1.0)

        assert report.hurwitz
        assert report.sampled_radius is not None and report.sampled_radius < 1.0

    @settings(max_examples=25, deadline=None)
    @given(period=st.floats(0.05, 5.0))
    def test_hurwitz_gives_contracting_samples(self, period: float) -> None:
        """Test a Hurwitz closed loop has sampled radius below one at every period."""
        spec, K_inf = _planar_stationary()

        report = closed_loop_eigs(spec, K_inf, period=period)

        assert isinstance(report, StabilityReport)
        assert report.hurwitz
        assert report.period == period
        assert report.sampled_radius is not None and report.sampled_radius < 1.0


class TestMonotonicity:
    """Tests for monotonicity_check."""

    def test_refinement_lowers_cost(self, scalar_spec: GameSpec, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution) -> None:
        """Test adding instants does not raise the estimation term."""
        report = monotonicity_check(scalar_spec, scalar_cache, scalar_riccati, (0.5,), (0.25, 0.5, 0.75))

        assert isinstance(report, MonotonicityReport)
        assert report.holds
        assert report.strict
        assert report.refined_term < report.coarse_term

    def test_not_subset(self, scalar_spec: GameSpec, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution) -> None:
        """Test a refinement must contain the coarse instants."""
        with pytest.raises(NotSubsetError):
            monotonicity_check(scalar_spec, scalar_cache, scalar_riccati, (0.4,), (0.25, 0.5))


class TestErrorVariance:
    """Tests for error_variance."""

    def test_resets_at_instants(self, scalar_cache: GramianCache) -> None:
        """Test P(t) = t - tau(t) for the scalar integrator."""
        plan = ObservationPlan.from_instants([0.5], horizon=1.0)

        P = error_variance(scalar_cache, plan, EMPTY, np.array([0.1, 0.5, 0.7]))

        np.testing.assert_allclose(P[:, 0, 0], [0.1, 0.0, 0.2], atol=1e-12)


class TestEvaderGain:
    """Tests for evader_gain."""

    def test_observing_hurts_evader(self) -> None:
        """Test a single evader observation lowers the evader's objective."""
        spec = scalar_game(Op=0.05, Oe=0.01)
        grid = TimeGrid(spec.T, 256)
        riccati = solve_riccati_finite(spec, grid)
        cache = GramianCache(spec, grid)
        plan_p = ObservationPlan.from_instants([0.6], horizon=1.0)

        assert evader_gain(spec, cache, riccati, plan_p, 0.3) < 0.0
        assert evader_gain(spec, cache, riccati, plan_p, 0.6) == pytest.approx(-0.01)
