"""Occupation numbers of consecutive intervals for the sine processes.

``X_n`` counts points in ``I_n = [n lam - lam/2, n lam + lam/2)``. By
stationarity

    Cov(X_0, X_n) = lam rho [n = 0] + int F(v) w_n(v) dv,   w_n(v) = max(0, lam - |v - n lam|),

so every covariance is a one-dimensional integral of ``F`` against a tent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ContractError
from .kernels import MatrixKernel
from .quad import gl_panels
from .stationary import StationaryProfile, stationary_profile

__all__ = [
    "IntervalGrid",
    "CovarianceSeries",
    "occupation_cov",
    "covariance_series",
    "cov_total_sum",
    "cov_abs_tail",
    "divergence_probe_sine4_lambda1",
    "write_occupation_csv",
]

N_MAX_DEFAULT = 512


@dataclass(frozen=True)
class IntervalGrid:
    """Intervals ``I_n = [n lam - lam/2, n lam + lam/2)``."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ContractError("interval length must be positive")

    def interval(self, n: int) -> tuple[float, float]:
        c = n * self.lam
        return c - 0.5 * self.lam, c + 0.5 * self.lam

    def index(self, x):
        """Index ``n`` of the interval containing ``x``."""
        return np.floor(np.asarray(x, dtype=float) / self.lam + 0.5).astype(int)


def _profile_of(kernel) -> StationaryProfile:
    if isinstance(kernel, StationaryProfile):
        return kernel
    if isinstance(kernel, MatrixKernel) and not kernel.stationary:
        raise ContractError(f"{kernel.name} is not stationary")
    name = getattr(kernel, "name", kernel)
    if name not in ("sine1", "sine4"):
        raise ContractError(f"{name!r} is not a stationary kernel")
    return stationary_profile(name)


def _tent_integrals(prof: StationaryProfile, lam: float, ns: np.ndarray, npts: int = 16) -> np.ndarray:
    # int F(v) w_n(v) dv on panels of width <= 1/4 covering [(n-1) lam, (n+1) lam]
    k = max(1, int(math.ceil(lam / 0.25)))
    t, w = gl_panels(np.linspace(-lam, lam, 2 * k + 1), npts)
    tent = (lam - np.abs(t)) * w
    v = np.abs(ns[:, None] * lam + t[None, :])
    return prof.F(v) @ tent


def occupation_cov(kernel, lam: float, n: int) -> float:
    """``Cov(X_0, X_n)`` for the sine process ``kernel``."""
    prof = _profile_of(kernel)
    if not lam > 0:
        raise ContractError("lam must be positive")
    n = int(n)
    val = float(_tent_integrals(prof, float(lam), np.array([abs(n)]))[0])
    return val + (lam * prof.rho if n == 0 else 0.0)


class CovarianceSeries(NamedTuple):
    """``Cov(X_0, X_n)`` for ``0 <= n <= n_max``.

    ``tail_constant`` is ``c`` in the model ``|Cov_n| <= c / n^2`` used beyond
    ``n_max``; it is ``None`` when the covariances are not square-summable at
    that rate (sine4 with ``lam`` not an even integer).
    """

    process: str
    lam: float
    values: np.ndarray
    tail_constant: float | None

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    def cov(self, n: int) -> float:
        n = abs(int(n))
        if n > self.n_max:
            raise ContractError(f"n = {n} beyond n_max = {self.n_max}")
        return float(self.values[n])


def _even_integer(x: float) -> bool:
    return abs(x / 2.0 - round(x / 2.0)) < 1e-12


def covariance_series(kernel, lam: float, n_max: int = N_MAX_DEFAULT) -> CovarianceSeries:
    """Covariances up to ``n_max`` and a fitted inverse-square tail constant."""
    prof = _profile_of(kernel)
    lam = float(lam)
    if not lam > 0:
        raise ContractError("lam must be positive")
    ns = np.arange(n_max + 1)
    vals = _tent_integrals(prof, lam, ns)
    vals[0] += lam * prof.rho
    tail = None
    if prof.process == "sine1" or _even_integer(lam):
        lo = max(1, n_max // 2)
        tail = float(np.max(np.abs(vals[lo:]) * ns[lo:] ** 2)) if n_max >= 1 else 0.0
    return CovarianceSeries(prof.process, lam, vals, tail)


class TotalSum(NamedTuple):
    value: float
    tail_estimate: float


def cov_total_sum(series: CovarianceSeries, N: int) -> TotalSum:
    """``sum_{|n| <= N} Cov(X_0, X_n)`` and a bound on the omitted tail."""
    N = int(N)
    if N < 0 or N > series.n_max:
        raise ContractError(f"N must lie in [0, {series.n_max}]")
    v = series.values
    total = float(v[0] + 2.0 * v[1:N + 1].sum())
    if series.tail_constant is None:
        tail = math.inf
    else:
        tail = 2.0 * series.tail_constant / N if N > 0 else math.inf
    return TotalSum(total, tail)


class AbsTail(NamedTuple):
    N: int
    tail: float
    scaled: float


def cov_abs_tail(series: CovarianceSeries, N: int) -> AbsTail:
    """``sum_{|n| >= N} |Cov|`` (explicit terms plus modelled tail) and ``N`` times it."""
    N = int(N)
    if N < 1:
        raise ContractError("N must be >= 1")
    if series.tail_constant is None:
        raise ContractError(f"no tail model for {series.process} at lam = {series.lam}")
    v = np.abs(series.values)
    explicit = 2.0 * float(v[N:].sum()) if N <= series.n_max else 0.0
    start = max(N, series.n_max + 1)
    modelled = 2.0 * series.tail_constant / (start - 1) if start > 1 else math.inf
    tail = explicit + modelled
    return AbsTail(N, tail, N * tail)


def divergence_probe_sine4_lambda1(N_list: Sequence[int], lam: float = 1.0) -> list[tuple[int, float]]:
    """Partial absolute sums ``S_N = sum_{|n| <= N} |Cov(X_0, X_n)|`` for sine4."""
    ns = [int(n) for n in N_list]
    if not ns:
        return []
    if min(ns) < 0:
        raise ContractError("N must be non-negative")
    series = covariance_series("sine4", lam, n_max=max(ns))
    a = np.abs(series.values)
    csum = a[0] + 2.0 * np.concatenate([[0.0], np.cumsum(a[1:])])
    return [(n, float(csum[n])) for n in ns]


def write_occupation_csv(series: CovarianceSeries, fh, N: int | None = None) -> None:
    """CSV ``process,lambda,n,cov`` for ``-N <= n <= N``."""
    N = series.n_max if N is None else int(N)
    fh.write("process,lambda,n,cov\n")
    for n in range(-N, N + 1):
        fh.write(f"{series.process},{series.lam:.17g},{n},{series.values[abs(n)]:.17g}\n")
