"""Game specification model and maneuverability classification."""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import NDArray

from peec.errors import (
    DimensionMismatchError,
    NonFiniteEntryError,
    NonPositiveHorizonError,
    NotPositiveDefiniteError,
    SpecValidationError,
)

Matrix = NDArray[np.float64]

# Relative tolerance for symmetry and eigenvalue sign tests of weight matrices.
DEFINITENESS_TOL = 1e-10

MATRIX_FIELDS = ("A", "Bp", "Be", "C", "Q", "QT", "Rp", "Re")


@dataclass(frozen=True, eq=False)
class GameSpec:
    """One PEEC game instance: dynamics, weights, observation prices, horizon.

    The state is the relative state x = x_p - x_e. ``Op`` and ``Oe`` may be
    ``math.inf`` to encode a player that can never afford to observe.
    """

    A: Matrix
    Bp: Matrix
    Be: Matrix
    C: Matrix
    Q: Matrix
    QT: Matrix
    Rp: Matrix
    Re: Matrix
    Op: float
    Oe: float
    T: float
    x0: Matrix

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    @property
    def m_p(self) -> int:
        return int(self.Bp.shape[1])

    @property
    def m_e(self) -> int:
        return int(self.Be.shape[1])

    @property
    def q(self) -> int:
        return int(self.C.shape[1])

    @property
    def CCt(self) -> Matrix:
        return self.C @ self.C.T

    @property
    def gap(self) -> Matrix:
        """D = Bp Rp^-1 Bp' - Be Re^-1 Be', symmetrized."""
        d_p = self.Bp @ np.linalg.solve(self.Rp, self.Bp.T)
        d_e = self.Be @ np.linalg.solve(self.Re, self.Be.T)
        d = d_p - d_e
        return 0.5 * (d + d.T)

    def with_updates(self, **changes: Any) -> "GameSpec":
        """Return a validated copy with some fields replaced."""
        return validate_spec(replace(self, **changes))


class Dominance(str, Enum):
    """Maneuverability relation between pursuer and evader."""

    PURSUER_DOMINANT = "PursuerDominant"
    EQUAL = "Equal"
    NOT_DOMINANT = "NotDominant"


@dataclass(frozen=True, eq=False)
class DominanceClass:
    """Gap matrix D and its classification."""

    gap: Matrix
    label: Dominance
    eigenvalues: Matrix
    tol: float


def _as_matrix(name: str, value: Any) -> Matrix:
    arr = np.array(value, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntryError(name)
    return arr


def _check_shape(name: str, arr: Matrix, rows: int, cols: int) -> None:
    if arr.shape != (rows, cols):
        raise DimensionMismatchError(
            f"{name} has shape {arr.shape}, expected ({rows}, {cols})"
        )


def _check_definite(name: str, arr: Matrix, strict: bool) -> None:
    scale = max(1.0, float(np.max(np.abs(arr))))
    if not np.allclose(arr, arr.T, rtol=0.0, atol=DEFINITENESS_TOL * scale):
        raise NotPositiveDefiniteError(name, semi=not strict)
    eigs = np.linalg.eigvalsh(0.5 * (arr + arr.T))
    tol = DEFINITENESS_TOL * float(np.max(np.abs(eigs))) if eigs.size else 0.0
    if strict and not eigs[0] > tol:
        raise NotPositiveDefiniteError(name)
    if not strict and eigs[0] < -tol:
        raise NotPositiveDefiniteError(name, semi=True)


def _check_price(name: str, value: Any) -> float:
    price = float(value)
    if math.isnan(price) or price == -math.inf:
        raise NonFiniteEntryError(name)
    if price < 0:
        raise SpecValidationError(f"Observation price {name} must be nonnegative, got {price}")
    return price


def _frozen(arr: Matrix) -> Matrix:
    arr.setflags(write=False)
    return arr


def validate_spec(raw: GameSpec) -> GameSpec:
    """Check every GameSpec invariant and return an immutable copy.

    Args:
        raw: Spec whose fields may be nested lists or arrays.

    Returns:
        Validated spec with read-only float arrays and symmetrized weights.

    Raises:
        DimensionMismatchError: If shapes are inconsistent.
        NotPositiveDefiniteError: If Q, QT are not PSD or Rp, Re are not PD.
        NonFiniteEntryError: If a matrix entry is NaN/inf or a price is NaN.
        SpecValidationError: If a price is negative.
        NonPositiveHorizonError: If T <= 0 or T is not finite.
    """
    mats = {name: _as_matrix(name, getattr(raw, name)) for name in MATRIX_FIELDS}

    x0 = np.array(raw.x0, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x0)):
        raise NonFiniteEntryError("x0")

    n = mats["A"].shape[0]
    _check_shape("A", mats["A"], n, n)
    m_p = mats["Bp"].shape[1]
    m_e = mats["Be"].shape[1]
    q = mats["C"].shape[1]
    _check_shape("Bp", mats["Bp"], n, m_p)
    _check_shape("Be", mats["Be"], n, m_e)
    _check_shape("C", mats["C"], n, q)
    _check_shape("Q", mats["Q"], n, n)
    _check_shape("QT", mats["QT"], n, n)
    _check_shape("Rp", mats["Rp"], m_p, m_p)
    _check_shape("Re", mats["Re"], m_e, m_e)
    if x0.shape != (n,):
        raise DimensionMismatchError(f"x0 has length {x0.size}, expected {n}")

    _check_definite("Q", mats["Q"], strict=False)
    _check_definite("QT", mats["QT"], strict=False)
    _check_definite("Rp", mats["Rp"], strict=True)
    _check_definite("Re", mats["Re"], strict=True)
    for name in ("Q", "QT", "Rp", "Re"):
        mats[name] = 0.5 * (mats[name] + mats[name].T)

    horizon = float(raw.T)
    if not math.isfinite(horizon) or horizon <= 0:
        raise NonPositiveHorizonError(horizon)

    return GameSpec(
        **{name: _frozen(arr) for name, arr in mats.items()},
        Op=_check_price("Op", raw.Op),
        Oe=_check_price("Oe", raw.Oe),
        T=horizon,
        x0=_frozen(x0),
    )


def dominance_tol(eigenvalues: Matrix) -> float:
    """Scale-free zero threshold for the gap eigenvalues."""
    largest = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return 1e-9 * (1.0 + largest)


def classify_dominance(spec: GameSpec) -> DominanceClass:
    """Classify maneuverability dominance from the gap matrix D.

    PursuerDominant means D is positive semi-definite and nonzero. Equal means
    D vanishes within tolerance. Any eigenvalue below -tol means NotDominant.
    """
    gap = spec.gap
    eigs = np.linalg.eigvalsh(gap)
    tol = dominance_tol(eigs)

    if np.all(np.abs(eigs) <= tol):
        label = Dominance.EQUAL
    elif eigs[0] >= -tol:
        label = Dominance.PURSUER_DOMINANT
    else:
        label = Dominance.NOT_DOMINANT

    return DominanceClass(gap=_frozen(gap), label=label, eigenvalues=eigs, tol=tol)
