"""Small game instances with known closed forms, for tests."""

import numpy as np

from peec.models.game import GameSpec, validate_spec


def scalar_game(
    a: float = 0.0,
    q: float = 0.0,
    q_terminal: float = 1.0,
    r_p: float = 1.0,
    c: float = 1.0,
    Op: float = 0.05,
    Oe: float = 0.0,
    T: float = 1.0,
    x0: float = 1.0,
) -> GameSpec:
    """One-dimensional game with a pursuer-only control; D = 1 / r_p.

    With a = q = 0 the Riccati solution is K(t) = 1 / (1/q_terminal + T - t).
    """
    return validate_spec(
        GameSpec(
            A=np.array([[a]]),
            Bp=np.array([[1.0]]),
            Be=np.array([[0.0]]),
            C=np.array([[c]]),
            Q=np.array([[q]]),
            QT=np.array([[q_terminal]]),
            Rp=np.array([[r_p]]),
            Re=np.array([[1.0]]),
            Op=Op,
            Oe=Oe,
            T=T,
            x0=np.array([x0]),
        )
    )


def random_dominant_game(
    rng: np.random.Generator,
    n: int = 2,
    Op: float = 1.0,
    Oe: float = 0.0,
    T: float = 2.0,
) -> GameSpec:
    """Random game with Be = beta Bp (beta < 1), so the pursuer dominates."""
    Bp = rng.normal(size=(n, 1))
    beta = rng.uniform(0.2, 0.8)
    return validate_spec(
        GameSpec(
            A=rng.uniform(-0.5, 0.5, size=(n, n)),
            Bp=Bp,
            Be=beta * Bp,
            C=rng.normal(size=(n, n)),
            Q=np.eye(n),
            QT=np.eye(n),
            Rp=np.eye(1),
            Re=np.eye(1),
            Op=Op,
            Oe=Oe,
            T=T,
            x0=rng.normal(scale=3.0, size=n),
        )
    )
