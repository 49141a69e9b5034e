"""Pfaffians of real antisymmetric matrices.

Skew-symmetric Parlett-Reid reduction with partial pivoting. Each step picks
the largest entry of the current column below the diagonal, swaps it into
the sub-diagonal position (flipping the sign of the Pfaffian) and eliminates
with a rank-2 update that preserves antisymmetry. Cost is O(n^3).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ContractError

__all__ = ["PfaffianResult", "antisymmetrize", "pfaffian", "pfaffian_ex"]

SKEW_TOL = 1e-12
DEGENERATE_TOL = 1e-14


class PfaffianResult(NamedTuple):
    value: float
    degenerate: bool


def antisymmetrize(a, tol: float = SKEW_TOL) -> np.ndarray:
    """Validate ``a`` as an even-dimensional antisymmetric matrix.

    Returns ``(a - a.T)/2`` as a fresh float array. Raises
    :class:`ContractError` for odd or non-square input, or when
    ``|a + a.T|`` exceeds ``tol * max(1, |a|)`` entrywise.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0 or n % 2:
        raise ContractError(f"Pfaffian needs a positive even dimension, got {n}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a + a.T)) > tol * scale:
        raise ContractError("matrix is not antisymmetric within tolerance")
    return 0.5 * (a - a.T)


def pfaffian_ex(a) -> PfaffianResult:
    """Pfaffian together with a degeneracy flag.

    When a pivot falls below ``1e-14 * max|a|`` the matrix is treated as
    singular and ``PfaffianResult(0.0, True)`` is returned; this is how
    coincident points in a correlation function show up.
    """
    a = antisymmetrize(a)
    n = a.shape[0]
    norm = float(np.max(np.abs(a)))
    if norm == 0.0:
        return PfaffianResult(0.0, True)
    floor = DEGENERATE_TOL * norm
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        pivot = a[k, k + 1]
        if abs(pivot) < floor:
            return PfaffianResult(0.0, True)
        pf *= pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1]
            upd = np.outer(tau, col)
            a[k + 2:, k + 2:] += upd - upd.T
    return PfaffianResult(float(pf), False)


def pfaffian(a) -> float:
    """Pfaffian of an even-dimensional real antisymmetric matrix.

    >>> pfaffian([[0.0, 2.5], [-2.5, 0.0]])
    2.5
    """
    return pfaffian_ex(a).value
