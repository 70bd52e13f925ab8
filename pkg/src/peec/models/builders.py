"""Constructors for common pursuit-evasion formulations."""

import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike

from peec.errors import DimensionMismatchError
from peec.models.game import GameSpec, validate_spec

# Player state given as (y1, y2, v1, v2) -> (y1, v1, y2, v2).
PLANAR_PERMUTATION = (0, 2, 1, 3)


def relative_game(
    A: ArrayLike,
    Bp: ArrayLike,
    Be: ArrayLike,
    Cp: ArrayLike,
    Ce: ArrayLike,
    Q: ArrayLike,
    QT: ArrayLike,
    Rp: ArrayLike,
    Re: ArrayLike,
    Op: float,
    Oe: float,
    T: float,
    xp0: ArrayLike,
    xe0: ArrayLike,
) -> GameSpec:
    """Game on the relative state x = x_p - x_e for players sharing the drift A.

    The two noise channels are stacked, C = [C_p  C_e], so CC' = C_pC_p' + C_eC_e'.
    """
    C = np.hstack((np.atleast_2d(np.asarray(Cp, dtype=float)), np.atleast_2d(np.asarray(Ce, dtype=float))))
    x0 = np.asarray(xp0, dtype=float) - np.asarray(xe0, dtype=float)
    return validate_spec(
        GameSpec(
            A=np.asarray(A, dtype=float),
            Bp=np.asarray(Bp, dtype=float),
            Be=np.asarray(Be, dtype=float),
            C=C,
            Q=np.asarray(Q, dtype=float),
            QT=np.asarray(QT, dtype=float),
            Rp=np.asarray(Rp, dtype=float),
            Re=np.asarray(Re, dtype=float),
            Op=Op,
            Oe=Oe,
            T=T,
            x0=x0,
        )
    )


def stacked_game(
    Ap: ArrayLike,
    Ae: ArrayLike,
    Bp: ArrayLike,
    Be: ArrayLike,
    Cp: ArrayLike,
    Ce: ArrayLike,
    W: ArrayLike,
    Rp: ArrayLike,
    Re: ArrayLike,
    Op: float,
    Oe: float,
    T: float,
    xp0: ArrayLike,
    xe0: ArrayLike,
    terminal_scale: float = 1.0,
) -> GameSpec:
    """Game on the stacked state x = [x_p; x_e] with independent player dynamics.

    Q = [[I, -I], [-I, I]] (x) W so that x'Qx = |x_p - x_e|^2_W, and
    QT = terminal_scale * Q.
    """
    Ap_, Ae_ = np.atleast_2d(np.asarray(Ap, dtype=float)), np.atleast_2d(np.asarray(Ae, dtype=float))
    if Ap_.shape != Ae_.shape:
        raise DimensionMismatchError(f"player drifts differ in shape: {Ap_.shape} vs {Ae_.shape}")
    Bp_, Be_ = np.atleast_2d(np.asarray(Bp, dtype=float)), np.atleast_2d(np.asarray(Be, dtype=float))
    Cp_, Ce_ = np.atleast_2d(np.asarray(Cp, dtype=float)), np.atleast_2d(np.asarray(Ce, dtype=float))
    m = Ap_.shape[0]

    pairing = np.array([[1.0, -1.0], [-1.0, 1.0]])
    Q = np.kron(pairing, np.atleast_2d(np.asarray(W, dtype=float)))
    return validate_spec(
        GameSpec(
            A=np.block([[Ap_, np.zeros((m, m))], [np.zeros((m, m)), Ae_]]),
            Bp=np.vstack((Bp_, np.zeros((m, Bp_.shape[1])))),
            Be=np.vstack((np.zeros((m, Be_.shape[1])), Be_)),
            C=np.block(
                [
                    [Cp_, np.zeros((m, Ce_.shape[1]))],
                    [np.zeros((m, Cp_.shape[1])), Ce_],
                ]
            ),
            Q=Q,
            QT=terminal_scale * Q,
            Rp=np.asarray(Rp, dtype=float),
            Re=np.asarray(Re, dtype=float),
            Op=Op,
            Oe=Oe,
            T=T,
            x0=np.concatenate((np.asarray(xp0, dtype=float), np.asarray(xe0, dtype=float))),
        )
    )


def planar_positions(player_state: Sequence[float]) -> list[float]:
    """Reorder a (y1, y2, v1, v2) player state into (y1, v1, y2, v2)."""
    if len(player_state) != 4:
        raise DimensionMismatchError(f"planar state needs 4 entries, got {len(player_state)}")
    return [float(player_state[i]) for i in PLANAR_PERMUTATION]


def planar_double_integrator(
    c_p: float = 4.0,
    c_e: float = 4.0,
    gamma: float = 0.8,
    Op: float = math.inf,
    Oe: float = 0.0,
    T: float = 6.0,
    xp0: Sequence[float] = (50.0, -20.0, 5.0, 10.0),
    xe0: Sequence[float] = (-50.0, 10.0, 1.0, 10.0),
    terminal_scale: float = 10.0,
) -> GameSpec:
    """Two-axis double-integrator chase in the (y1, v1, y2, v2) ordering.

    Each axis is [[0, 1], [0, 0]] driven by acceleration; Re = 2I, Rp = gamma*Re,
    Q penalizes position only and QT = terminal_scale * Q. The relative noise
    level is c = sqrt(c_p^2 + c_e^2) on every state. Initial states are given
    as (y1, y2, v1, v2) and reordered.
    """
    axis_A = np.array([[0.0, 1.0], [0.0, 0.0]])
    axis_B = np.array([[0.0], [1.0]])
    axis_Q = np.array([[1.0, 0.0], [0.0, 0.0]])
    eye2 = np.eye(2)
    Re = 2.0 * eye2
    Q = np.kron(eye2, axis_Q)
    c = math.hypot(c_p, c_e)

    x0 = np.array(planar_positions(xp0)) - np.array(planar_positions(xe0))
    return validate_spec(
        GameSpec(
            A=np.kron(eye2, axis_A),
            Bp=np.kron(eye2, axis_B),
            Be=np.kron(eye2, axis_B),
            C=c * np.eye(4),
            Q=Q,
            QT=terminal_scale * Q,
            Rp=gamma * Re,
            Re=Re,
            Op=Op,
            Oe=Oe,
            T=T,
            x0=x0,
        )
    )
