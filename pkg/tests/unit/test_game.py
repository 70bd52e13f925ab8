"""Unit tests for the game model."""

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dev.games import scalar_game
from peec.errors import (
    DimensionMismatchError,
    NonFiniteEntryError,
    NonPositiveHorizonError,
    NotPositiveDefiniteError,
    SpecValidationError,
)
from peec.models.builders import planar_double_integrator
from peec.models.game import Dominance, GameSpec, classify_dominance

positive = st.floats(min_value=0.1, max_value=10.0)


def _two_player(bp: float, be: float, rp: float, re: float) -> GameSpec:
    spec = scalar_game()
    return spec.with_updates(
        Bp=np.array([[bp]]),
        Be=np.array([[be]]),
        Rp=np.array([[rp]]),
        Re=np.array([[re]]),
    )


class TestValidateSpec:
    """Tests for GameSpec validation."""

    def test_planar_spec_dimensions(self) -> None:
        """Test the planar game has the expected sizes."""
        spec = planar_double_integrator()

        assert spec.n == 4
        assert spec.m_p == 2
        assert spec.m_e == 2
        assert spec.q == 4

    def test_arrays_are_read_only(self, scalar_spec: GameSpec) -> None:
        """Test validated matrices cannot be mutated."""
        with pytest.raises(ValueError):
            scalar_spec.A[0, 0] = 1.0

    def test_weights_are_symmetrized(self) -> None:
        """Test nearly symmetric weights come back exactly symmetric."""
        spec = planar_double_integrator()
        Q = np.array(spec.Q)
        Q[0, 1] = 1e-13

        updated = spec.with_updates(Q=Q)

        np.testing.assert_array_equal(updated.Q, updated.Q.T)

    def test_dimension_mismatch(self, scalar_spec: GameSpec) -> None:
        """Test a Bp with the wrong row count is rejected."""
        with pytest.raises(DimensionMismatchError):
            scalar_spec.with_updates(Bp=np.ones((2, 1)))

    def test_x0_length_mismatch(self, scalar_spec: GameSpec) -> None:
        """Test an initial state of the wrong length is rejected."""
        with pytest.raises(DimensionMismatchError):
            scalar_spec.with_updates(x0=np.zeros(2))

    def test_control_weight_must_be_definite(self, scalar_spec: GameSpec) -> None:
        """Test a singular Rp is rejected."""
        with pytest.raises(NotPositiveDefiniteError) as exc_info:
            scalar_spec.with_updates(Rp=np.array([[0.0]]))

        assert exc_info.value.matrix == "Rp"

    def test_state_weight_must_be_semidefinite(self, scalar_spec: GameSpec) -> None:
        """Test a negative Q is rejected."""
        with pytest.raises(NotPositiveDefiniteError):
            scalar_spec.with_updates(Q=np.array([[-1.0]]))

    def test_non_finite_entry(self, scalar_spec: GameSpec) -> None:
        """Test NaN matrix entries are rejected."""
        with pytest.raises(NonFiniteEntryError):
            scalar_spec.with_updates(A=np.array([[math.nan]]))

    def test_non_positive_horizon(self, scalar_spec: GameSpec) -> None:
        """Test T = 0 is rejected."""
        with pytest.raises(NonPositiveHorizonError):
            scalar_spec.with_updates(T=0.0)

    def test_negative_price(self, scalar_spec: GameSpec) -> None:
        """Test a negative observation price is rejected."""
        with pytest.raises(SpecValidationError):
            scalar_spec.with_updates(Op=-1.0)

    def test_infinite_price_allowed(self, scalar_spec: GameSpec) -> None:
        """Test Op = inf encodes a player who never observes."""
        assert math.isinf(scalar_spec.with_updates(Op=math.inf).Op)


class TestDominance:
    """Tests for maneuverability classification."""

    def test_planar_gap(self) -> None:
        """Test the planar gap is diag(0, 1/8, 0, 1/8) and pursuer dominant."""
        result = classify_dominance(planar_double_integrator())

        np.testing.assert_allclose(result.gap, np.diag([0.0, 0.125, 0.0, 0.125]), atol=1e-15)
        assert result.label is Dominance.PURSUER_DOMINANT

    def test_equal_maneuverability(self) -> None:
        """Test gamma = 1 gives the Equal class."""
        result = classify_dominance(planar_double_integrator(gamma=1.0))

        assert result.label is Dominance.EQUAL

    def test_evader_dominant(self) -> None:
        """Test gamma > 1 gives NotDominant."""
        result = classify_dominance(planar_double_integrator(gamma=1.2))

        assert result.label is Dominance.NOT_DOMINANT

    @given(bp=positive, be=positive, rp=positive, re=positive, scale=positive)
    def test_label_invariant_under_common_weight_scaling(
        self, bp: float, be: float, rp: float, re: float, scale: float
    ) -> None:
        """Test scaling both control weights keeps the label."""
        gap = bp**2 / rp - be**2 / re
        assume(abs(gap) > 1e-3 * (bp**2 / rp + be**2 / re))

        base = classify_dominance(_two_player(bp, be, rp, re)).label
        scaled = classify_dominance(_two_player(bp, be, scale * rp, scale * re)).label

        assert base is scaled

    @given(bp=positive, be=positive, rp=positive, re=positive)
    def test_swapping_players_flips_label(self, bp: float, be: float, rp: float, re: float) -> None:
        """Test exchanging the players turns dominance into non-dominance."""
        gap = bp**2 / rp - be**2 / re
        assume(abs(gap) > 1e-3 * (bp**2 / rp + be**2 / re))

        forward = classify_dominance(_two_player(bp, be, rp, re)).label
        swapped = classify_dominance(_two_player(be, bp, re, rp)).label

        assert {forward, swapped} == {Dominance.PURSUER_DOMINANT, Dominance.NOT_DOMINANT}
