"""Unit tests for game builders."""

import numpy as np
import pytest

from peec.errors import DimensionMismatchError
from peec.models.builders import (
    planar_double_integrator,
    planar_positions,
    relative_game,
    stacked_game,
)


class TestRelativeGame:
    """Tests for the relative-state formulation."""

    def test_noise_channels_are_stacked(self) -> None:
        """Test CC' is the sum of the players' noise intensities."""
        spec = relative_game(
            A=[[0.0]],
            Bp=[[1.0]],
            Be=[[0.5]],
            Cp=[[3.0]],
            Ce=[[4.0]],
            Q=[[1.0]],
            QT=[[1.0]],
            Rp=[[1.0]],
            Re=[[1.0]],
            Op=1.0,
            Oe=0.0,
            T=1.0,
            xp0=[2.0],
            xe0=[-1.0],
        )

        assert spec.q == 2
        np.testing.assert_allclose(spec.CCt, [[25.0]])
        np.testing.assert_allclose(spec.x0, [3.0])


class TestStackedGame:
    """Tests for the stacked formulation."""

    def test_state_weight_measures_separation(self) -> None:
        """Test x'Qx equals the weighted squared distance between players."""
        W = np.diag([1.0, 2.0])
        spec = stacked_game(
            Ap=np.zeros((2, 2)),
            Ae=np.zeros((2, 2)),
            Bp=np.eye(2),
            Be=0.5 * np.eye(2),
            Cp=np.eye(2),
            Ce=np.eye(2),
            W=W,
            Rp=np.eye(2),
            Re=np.eye(2),
            Op=1.0,
            Oe=0.0,
            T=1.0,
            xp0=[1.0, 2.0],
            xe0=[4.0, -1.0],
            terminal_scale=3.0,
        )
        d = np.array([1.0, 2.0]) - np.array([4.0, -1.0])

        assert spec.n == 4
        assert float(spec.x0 @ spec.Q @ spec.x0) == pytest.approx(float(d @ W @ d))
        np.testing.assert_allclose(spec.QT, 3.0 * spec.Q)

    def test_drift_shapes_must_match(self) -> None:
        """Test players with different state sizes are rejected."""
        with pytest.raises(DimensionMismatchError):
            stacked_game(
                Ap=np.zeros((2, 2)),
                Ae=np.zeros((3, 3)),
                Bp=np.eye(2),
                Be=np.eye(3),
                Cp=np.eye(2),
                Ce=np.eye(3),
                W=np.eye(2),
                Rp=np.eye(2),
                Re=np.eye(3),
                Op=1.0,
                Oe=0.0,
                T=1.0,
                xp0=[0.0, 0.0],
                xe0=[0.0, 0.0, 0.0],
            )


class TestPlanarDoubleIntegrator:
    """Tests for the planar chase builder."""

    def test_initial_relative_state(self) -> None:
        """Test player states are reordered to (y1, v1, y2, v2) and differenced."""
        spec = planar_double_integrator()

        np.testing.assert_allclose(spec.x0, [100.0, 4.0, -30.0, 0.0])

    def test_noise_level(self) -> None:
        """Test the relative noise is sqrt(cp^2 + ce^2) on every state."""
        spec = planar_double_integrator(c_p=4.0, c_e=4.0)

        np.testing.assert_allclose(spec.CCt, 32.0 * np.eye(4))

    def test_weights(self) -> None:
        """Test Rp = gamma Re, Re = 2I and QT = 10 Q."""
        spec = planar_double_integrator(gamma=0.8)

        np.testing.assert_allclose(spec.Rp, 1.6 * np.eye(2))
        np.testing.assert_allclose(spec.Re, 2.0 * np.eye(2))
        np.testing.assert_allclose(spec.QT, 10.0 * spec.Q)
        np.testing.assert_allclose(np.diag(spec.Q), [1.0, 0.0, 1.0, 0.0])

    def test_planar_positions(self) -> None:
        """Test (y1, y2, v1, v2) maps to (y1, v1, y2, v2)."""
        assert planar_positions([1.0, 2.0, 3.0, 4.0]) == [1.0, 3.0, 2.0, 4.0]

    def test_planar_positions_length(self) -> None:
        """Test a state of the wrong length is rejected."""
        with pytest.raises(DimensionMismatchError):
            planar_positions([1.0, 2.0])
