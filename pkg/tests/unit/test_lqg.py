"""Unit tests for the Riccati, Gramian and quadrature numerics."""

import functools
import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from dev.games import scalar_game
from peec.errors import FiniteEscapeError, NotDominantSpecError, NotObservableError, OutOfRangeError
from peec.models.builders import planar_double_integrator
from peec.models.game import GameSpec
from peec.services.lqg import (
    GramianCache,
    RiccatiSolution,
    TimeGrid,
    algebraic_residual,
    gramian_tables,
    matrix_exp,
    panel_points,
    phi_at,
    sigma,
    sigma_trace_integrand,
    solve_riccati_algebraic,
    solve_riccati_finite,
    trace_cost_integral,
    van_loan_gramian,
)

entries = st.floats(min_value=-1.0, max_value=1.0)


def _reciprocal_error(n_steps: int) -> float:
    # K(t) = 1 / (1 + T - t) for the default scalar game
    spec = scalar_game()
    riccati = solve_riccati_finite(spec, TimeGrid(spec.T, n_steps))
    exact = 1.0 / (1.0 + spec.T - riccati.grid.nodes)
    return float(np.max(np.abs(riccati.K[:, 0, 0] - exact)))


@functools.cache
def _drifting_problem() -> tuple[GramianCache, RiccatiSolution]:
    spec = scalar_game(a=0.3, q=1.0, T=2.0)
    grid = TimeGrid(spec.T, 512)
    return GramianCache(spec, grid), solve_riccati_finite(spec, grid)


class TestTimeGrid:
    """Tests for TimeGrid."""

    def test_nodes(self) -> None:
        """Test nodes are uniform on [0, T]."""
        grid = TimeGrid(2.0, 4)

        np.testing.assert_allclose(grid.nodes, [0.0, 0.5, 1.0, 1.5, 2.0])
        assert grid.step == 0.5

    def test_check_clips_within_slack(self) -> None:
        """Test values a rounding error outside the range are clipped."""
        grid = TimeGrid(1.0, 4)

        assert grid.check("t", 1.0 + 1e-14) == 1.0

    def test_check_rejects_out_of_range(self) -> None:
        """Test values well outside the range raise."""
        with pytest.raises(OutOfRangeError):
            TimeGrid(1.0, 4).check("t", 1.5)


class TestGramian:
    """Tests for Van Loan Gramians and the cached tables."""

    def test_integrator_gramian_is_linear(self) -> None:
        """Test Sigma(tau) = W tau when A = 0."""
        gram = van_loan_gramian(np.zeros((1, 1)), np.array([[2.0]]), 0.7)

        assert gram[0, 0] == pytest.approx(1.4, rel=1e-12)

    def test_scalar_closed_form(self) -> None:
        """Test Sigma(tau) = w (e^{2a tau} - 1) / 2a."""
        a, w, tau = -0.8, 3.0, 1.3
        gram = van_loan_gramian(np.array([[a]]), np.array([[w]]), tau)

        assert gram[0, 0] == pytest.approx(w * (math.exp(2 * a * tau) - 1) / (2 * a), rel=1e-12)

    def test_double_integrator_closed_form(self) -> None:
        """Test the double-integrator Gramian with unit velocity noise."""
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        W = np.diag([0.0, 1.0])
        tau = 2.0

        gram = van_loan_gramian(A, W, tau)

        expected = np.array([[tau**3 / 3, tau**2 / 2], [tau**2 / 2, tau]])
        np.testing.assert_allclose(gram, expected, rtol=1e-12)

    def test_tables_match_direct_evaluation(self) -> None:
        """Test the recurrence reproduces Sigma(mh) and e^{Amh}."""
        spec = planar_double_integrator()
        E, S = gramian_tables(spec.A, spec.CCt, 0.1, 20)

        np.testing.assert_allclose(S[20], van_loan_gramian(spec.A, spec.CCt, 2.0), rtol=1e-10)
        np.testing.assert_allclose(E[20], matrix_exp(spec.A, 2.0), atol=1e-12)

    def test_cache_batches_match_van_loan(self, planar_cache: GramianCache, planar_spec: GameSpec) -> None:
        """Test batched Sigma and impulse values at off-grid lags."""
        lags = np.array([0.0, 0.0123, 1.7, 4.44444, planar_spec.T])

        sigmas = planar_cache.sigma_many(lags)
        impulses = planar_cache.impulse_many(lags)

        for lag, sig, imp in zip(lags, sigmas, impulses):
            E = matrix_exp(planar_spec.A, lag)
            np.testing.assert_allclose(sig, van_loan_gramian(planar_spec.A, planar_spec.CCt, lag), rtol=1e-9, atol=1e-9)
            np.testing.assert_allclose(imp, E @ planar_spec.CCt @ E.T, rtol=1e-10, atol=1e-10)

    def test_cache_rejects_negative_lag(self, planar_cache: GramianCache) -> None:
        """Test lags outside [0, T] raise."""
        with pytest.raises(OutOfRangeError):
            planar_cache.sigma_many(np.array([-0.5]))

    def test_sigma_matches_batched_cache(self, planar_cache: GramianCache, planar_spec: GameSpec) -> None:
        """Test the single-lag sigma agrees with the batched tables."""
        value = sigma(planar_cache, 2.345)

        np.testing.assert_allclose(value, planar_cache.sigma_many(np.array([2.345]))[0], rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(value, van_loan_gramian(planar_spec.A, planar_spec.CCt, 2.345), rtol=1e-12)
        assert not np.any(sigma(planar_cache, 0.0))

    @settings(max_examples=25, deadline=None)
    @given(a11=entries, a12=entries, a21=entries, a22=entries, s1=st.floats(0.0, 2.0), ds=st.floats(0.0, 1.0))
    def test_gramian_is_monotone(self, a11: float, a12: float, a21: float, a22: float, s1: float, ds: float) -> None:
        """Test Sigma(s2) - Sigma(s1) is PSD for s2 >= s1."""
        A = np.array([[a11, a12], [a21, a22]])
        W = np.array([[1.0, 0.3], [0.3, 0.5]])

        upper = van_loan_gramian(A, W, s1 + ds)
        diff = upper - van_loan_gramian(A, W, s1)

        scale = 1.0 + float(np.max(np.abs(upper)))
        assert float(np.min(np.linalg.eigvalsh(diff))) >= -1e-10 * scale

    @settings(max_examples=25, deadline=None)
    @given(s1=st.floats(0.0, 5.0), ds=st.floats(0.0, 1.0), p=st.floats(0.0, 3.0))
    def test_trace_pairing_is_monotone(self, s1: float, ds: float, p: float) -> None:
        """Test Tr[Sigma(s) P] is nondecreasing in s for PSD P."""
        spec = planar_double_integrator()
        P = np.diag([p, 1.0, 0.0, p])

        low = np.trace(van_loan_gramian(spec.A, spec.CCt, s1) @ P)
        high = np.trace(van_loan_gramian(spec.A, spec.CCt, s1 + ds) @ P)

        assert high >= low - 1e-9 * (1.0 + abs(low))


class TestRiccatiFinite:
    """Tests for the finite-horizon Riccati solution."""

    def test_tanh_solution(self) -> None:
        """Test -dK/dt = 1 - K^2 with K(T) = 0 gives tanh(T - t)."""
        spec = scalar_game(q=1.0, q_terminal=0.0, T=2.0)
        riccati = solve_riccati_finite(spec, TimeGrid(spec.T, 1024))

        np.testing.assert_allclose(riccati.K[:, 0, 0], np.tanh(spec.T - riccati.grid.nodes), atol=1e-9)

    def test_fourth_order_convergence(self) -> None:
        """Test halving the step cuts the error about sixteenfold."""
        coarse = _reciprocal_error(16)
        fine = _reciprocal_error(32)

        assert coarse / fine > 12.0

    def test_terminal_condition(self, planar_riccati: RiccatiSolution, planar_spec: GameSpec) -> None:
        """Test K(T) = QT and K stays symmetric."""
        np.testing.assert_array_equal(planar_riccati.K[-1], planar_spec.QT)
        np.testing.assert_allclose(planar_riccati.K, np.swapaxes(planar_riccati.K, 1, 2), atol=1e-12)

    def test_phi_is_k_gap_k(self, scalar_riccati: RiccatiSolution) -> None:
        """Test phi(t) = K D K at a node."""
        K = scalar_riccati.K_at(0.5)

        assert phi_at(scalar_riccati, 0.5)[0, 0] == pytest.approx(K[0, 0] ** 2, rel=1e-12)

    def test_finite_escape(self) -> None:
        """Test exponential blow-up past the cap raises."""
        spec = scalar_game(a=20.0, q=1.0, r_p=1.0).with_updates(Be=np.array([[1.0]]))

        with pytest.raises(FiniteEscapeError):
            solve_riccati_finite(spec, TimeGrid(spec.T, 256))

    def test_not_dominant(self) -> None:
        """Test an evader-dominant game is refused."""
        spec = planar_double_integrator(gamma=1.5)

        with pytest.raises(NotDominantSpecError):
            solve_riccati_finite(spec, TimeGrid(spec.T, 64))


class TestRiccatiAlgebraic:
    """Tests for the algebraic Riccati solution."""

    def test_scalar_closed_form(self) -> None:
        """Test 1 - K^2 / 2 = 0 gives K = sqrt(2)."""
        spec = scalar_game(q=1.0, r_p=2.0)

        K = solve_riccati_algebraic(spec)

        assert K[0, 0] == pytest.approx(math.sqrt(2.0), abs=1e-10)

    def test_planar_residual(self) -> None:
        """Test the planar solution meets the residual tolerance."""
        spec = planar_double_integrator()

        K = solve_riccati_algebraic(spec)

        norm = float(np.linalg.norm(K, 2))
        assert algebraic_residual(spec, K) <= 1e-8 * (1.0 + norm**2)

    def test_unobservable(self) -> None:
        """Test Q = 0 is refused unless the check is disabled."""
        spec = scalar_game(q=0.0)

        with pytest.raises(NotObservableError):
            solve_riccati_algebraic(spec)
        np.testing.assert_allclose(solve_riccati_algebraic(spec, require_observable=False), [[0.0]])

    def test_stationary_solution(self, planar_spec: GameSpec) -> None:
        """Test the stationary solution carries K~ at every node."""
        K_inf = solve_riccati_algebraic(planar_spec)
        grid = TimeGrid(10.0, 8)

        riccati = RiccatiSolution.stationary(K_inf, grid, planar_spec.gap)

        np.testing.assert_allclose(riccati.K_at(3.3), K_inf)


class TestTraceCostIntegral:
    """Tests for the trace-cost quadrature."""

    def test_scalar_closed_form(self, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution) -> None:
        """Test int_0^1 t / (2 - t)^2 dt = 1 - ln 2."""
        value = trace_cost_integral(scalar_cache, scalar_riccati, 0.0, 1.0, 0.0)

        assert value == pytest.approx(1.0 - math.log(2.0), abs=1e-5)

    def test_empty_interval(self, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution) -> None:
        """Test an empty interval integrates to zero."""
        assert trace_cost_integral(scalar_cache, scalar_riccati, 0.3, 0.3, 0.1) == 0.0

    def test_order_checked(self, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution) -> None:
        """Test t_a before tau0 raises."""
        with pytest.raises(OutOfRangeError):
            trace_cost_integral(scalar_cache, scalar_riccati, 0.2, 0.5, 0.4)

    def test_panel_points(self) -> None:
        """Test panels break at interior nodes and the endpoints."""
        points = panel_points(TimeGrid(1.0, 4), 0.1, 0.6)

        np.testing.assert_allclose(points, [0.1, 0.25, 0.5, 0.6])

    def test_exact_on_cubic_panels(self, scalar_cache: GramianCache, scalar_riccati: RiccatiSolution) -> None:
        """Test off-grid endpoints need no remainder rule when each panel is cubic."""
        # Sigma(s) = s and K is linear per panel, so the integrand is a cubic on every panel
        integrand = sigma_trace_integrand(scalar_cache, scalar_riccati, 0.1)
        nodes = scalar_riccati.grid.nodes
        inner = nodes[(nodes > 0.2) & (nodes < 0.77)]

        exact, _ = scipy.integrate.quad(
            lambda t: float(integrand(np.array([t]))[0]),
            0.2,
            0.77,
            points=inner,
            limit=4 * inner.size + 50,
            epsabs=1e-14,
            epsrel=1e-13,
        )

        assert trace_cost_integral(scalar_cache, scalar_riccati, 0.2, 0.77, 0.1) == pytest.approx(exact, rel=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(
        tau0=st.floats(0.0, 0.4),
        lag=st.floats(0.0, 0.2),
        first=st.floats(0.0, 0.65),
        second=st.floats(0.0, 0.65),
    )
    def test_additive_over_abutting_intervals(self, tau0: float, lag: float, first: float, second: float) -> None:
        """Test [a, b] + [b, c] = [a, c] for a common reset time."""
        cache, riccati = _drifting_problem()
        a = tau0 + lag
        b = a + first
        c = b + second

        whole = trace_cost_integral(cache, riccati, a, c, tau0)
        parts = trace_cost_integral(cache, riccati, a, b, tau0) + trace_cost_integral(cache, riccati, b, c, tau0)

        assert parts == pytest.approx(whole, rel=1e-8, abs=1e-12)
