"""Finite-N beta-ensembles sampled through their tridiagonal models.

Joint densities are proportional to ``prod w(x_i) prod_{i<j} |x_i - x_j|^beta``
with

    hermite:        w(x) = exp(-x^2 / 2)
    laguerre(a):    w(x) = x^a exp(-x),  x > 0

Both are realised as eigenvalues of random tridiagonal matrices with
independent normal and chi entries (Dumitriu and Edelman), which gives the
exact finite-N law in ``O(N)`` storage per sample. Every sample draws from its
own Philox stream keyed by ``(seed, sample index)``, so batches can be split,
reordered or run in parallel without changing any individual configuration.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import ContractError, ResourceError

__all__ = [
    "EnsembleSpec",
    "Configuration",
    "Bulk",
    "HardEdge",
    "sample",
    "sample_many",
    "rescale",
    "semicircle_density",
    "bessel4_laguerre_exponent",
    "CountStats",
    "counts_in",
    "empirical_count_stats",
    "ValidationResult",
    "validate_sine1_bulk",
    "validate_bessel4_hard_edge",
    "write_counts_csv",
    "summary_json",
]

MIN_SAMPLES = 1000
WEIGHTS = ("hermite", "laguerre")


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of a beta-ensemble.

    Parameters
    ----------
    beta : {1, 2, 4}
    weight : {"hermite", "laguerre"}
    N : int
        Number of eigenvalues.
    seed : int
        Non-negative, at most 64 bits.
    a : float
        Laguerre exponent, ``a > -1``; ignored for hermite.
    """

    beta: int
    weight: str
    N: int
    seed: int = 0
    a: float = 0.0

    def __post_init__(self):
        if self.beta not in (1, 2, 4):
            raise ContractError(f"beta must be 1, 2 or 4, got {self.beta!r}")
        if self.weight not in WEIGHTS:
            raise ContractError(f"weight must be one of {WEIGHTS}, got {self.weight!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ContractError("N must be a positive integer")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ContractError("seed must be a 64-bit non-negative integer")
        if self.weight == "laguerre" and not self.a > -1:
            raise ContractError("Laguerre exponent must exceed -1")


class Configuration(np.ndarray):
    """Sorted, finite 1-d array of points."""

    def __new__(cls, points):
        arr = np.sort(np.asarray(points, dtype=float).ravel())
        if not np.all(np.isfinite(arr)):
            raise ContractError("configuration points must be finite")
        return arr.view(cls)


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def _chi(rng, df):
    return np.sqrt(rng.chisquare(df))


def _hermite(rng, beta: int, N: int) -> np.ndarray:
    d = rng.standard_normal(N)
    if N == 1:
        return d
    e = _chi(rng, beta * np.arange(N - 1, 0, -1)) / math.sqrt(2.0)
    return eigvalsh_tridiagonal(d, e)


def _laguerre(rng, beta: int, N: int, a: float) -> np.ndarray:
    # B bidiagonal, diag chi_{2p - beta i}, subdiag chi_{beta (N - i)};
    # eig(B B^T) has density prod l^a exp(-l/2) |dl|^beta, rescaled by 1/2.
    p = a + 1.0 + 0.5 * beta * (N - 1)
    d = _chi(rng, 2.0 * p - beta * np.arange(N))
    if N == 1:
        return 0.5 * d * d
    s = _chi(rng, beta * np.arange(N - 1, 0, -1))
    diag = d * d
    diag[1:] += s * s
    return 0.5 * eigvalsh_tridiagonal(diag, d[:-1] * s)


def _draw(spec: EnsembleSpec, index: int) -> Configuration:
    rng = _stream(spec.seed, index)
    if spec.weight == "hermite":
        pts = _hermite(rng, spec.beta, spec.N)
    else:
        pts = _laguerre(rng, spec.beta, spec.N, spec.a)
    return Configuration(pts)


def sample(spec: EnsembleSpec, index: int = 0) -> Configuration:
    """One configuration, the ``index``-th of the seed's stream family."""
    return _draw(spec, index)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PPP_THREADS", "1")))
    except ValueError:
        return 1


def sample_many(spec: EnsembleSpec, n_samples: int, start: int = 0,
                threads: int | None = None) -> list[Configuration]:
    """Configurations ``start, ..., start + n_samples - 1``.

    ``threads`` defaults to ``PPP_THREADS`` (1 if unset); results do not
    depend on it.
    """
    idx = range(int(start), int(start) + int(n_samples))
    t = _threads() if threads is None else max(1, int(threads))
    if t == 1:
        return [_draw(spec, i) for i in idx]
    with ThreadPoolExecutor(t) as ex:
        return list(ex.map(lambda i: _draw(spec, i), idx))


# rescaling --------------------------------------------------------------------


class Bulk(NamedTuple):
    """``x -> (x - center) * density``: unit mean spacing around ``center``."""

    center: float = 0.0
    density: float = 1.0


class HardEdge(NamedTuple):
    """``x -> scale * N * x`` for the Laguerre weight ``x^a exp(-x)``.

    With ``N`` eigenvalues the spacing near 0 is of order ``1/N^2`` in ``x``
    and the Bessel limits live on the scale ``X = 2 N x``; ``scale = 2`` is
    that choice (``scale = 1/N`` with ``N = 1`` is the identity).
    """

    N: int
    scale: float = 2.0


def semicircle_density(beta: int, N: int, x: float = 0.0) -> float:
    """Leading-order eigenvalue density of the hermite ensemble at ``x``.

    Support ``|x| <= sqrt(2 beta N)``; density ``sqrt(2 beta N - x^2) / (pi beta)``.
    """
    r2 = 2.0 * beta * N - x * x
    return math.sqrt(r2) / (math.pi * beta) if r2 > 0 else 0.0


def rescale(points, mode) -> Configuration:
    """Apply a :class:`Bulk` or :class:`HardEdge` rescaling."""
    pts = np.asarray(points, dtype=float)
    if isinstance(mode, Bulk):
        out = (pts - mode.center) * mode.density
    elif isinstance(mode, HardEdge):
        if mode.N < 1:
            raise ContractError("hard edge needs N >= 1")
        out = mode.scale * mode.N * pts
    else:
        raise ContractError(f"unknown rescaling mode {mode!r}")
    return Configuration(out)


def bessel4_laguerre_exponent(s: float) -> float:
    """Exponent ``a`` of ``x^a exp(-x)`` whose beta = 4 hard edge gives ``bessel4(s)``.

    The symplectic Bessel kernel of order ``s`` arises from Laguerre
    polynomials of index ``2s - 1``; in the eigenvalue density this is the
    weight ``x^(2s)``.
    """
    if not s > -0.5:
        raise ContractError("s must exceed -1/2")
    return 2.0 * s


# count statistics ---------------------------------------------------------------


class CountStats(NamedTuple):
    """Sample mean and variance of a count, with standard errors."""

    mean: float
    variance: float
    stderr: float
    variance_stderr: float
    n_samples: int


def counts_in(samples: Iterable, interval: tuple[float, float]) -> np.ndarray:
    """Number of points in the half-open interval ``(lo, hi]`` for each sample."""
    lo, hi = map(float, interval)
    out = []
    for pts in samples:
        p = np.asarray(pts, dtype=float)
        out.append(int(np.searchsorted(p, hi, "right") - np.searchsorted(p, lo, "right")) if hi > lo else 0)
    return np.asarray(out, dtype=np.int64)


def empirical_count_stats(samples, interval: tuple[float, float]) -> CountStats:
    """Mean and variance of ``#(points in (lo, hi])`` over ``samples``.

    ``samples`` is a sequence of configurations, or a 1-d integer array of
    counts already taken. At least 1000 samples are required.

    Raises
    ------
    ResourceError
        Fewer than 1000 samples.
    """
    arr = samples if isinstance(samples, np.ndarray) and samples.ndim == 1 \
        and np.issubdtype(samples.dtype, np.integer) else None
    n = len(samples)
    if n < MIN_SAMPLES:
        raise ResourceError(f"need at least {MIN_SAMPLES} samples, got {n}")
    lo, hi = map(float, interval)
    if not hi > lo:
        return CountStats(0.0, 0.0, 0.0, 0.0, n)
    c = (arr if arr is not None else counts_in(samples, (lo, hi))).astype(float)
    mean = float(c.mean())
    dev = c - mean
    var = float(dev @ dev / (n - 1))
    m4 = float(np.mean(dev**4))
    # delta-method standard error of the sample variance
    vse = math.sqrt(max(m4 - var * var * (n - 3) / (n - 1), 0.0) / n)
    return CountStats(mean, var, math.sqrt(var / n), vse, n)


# validation against the scaling limits --------------------------------------------


class ValidationResult(NamedTuple):
    name: str
    statistic: str
    observed: float
    stderr: float
    target: float
    tolerance: float
    passed: bool
    counts: np.ndarray


def validate_sine1_bulk(n_samples: int = 10_000, N: int = 200, seed: int = 0,
                        threads: int | None = None) -> ValidationResult:
    """Count variance of a unit interval at the centre of the hermite beta=1 ensemble.

    Tolerance is ``3 sigma + 0.05`` around the sine1 value ``Cov(X_0, X_0)``
    at ``lam = 1``.
    """
    from .occupation import occupation_cov

    spec = EnsembleSpec(1, "hermite", N, seed)
    mode = Bulk(0.0, semicircle_density(1, N))
    counts = counts_in((rescale(c, mode) for c in sample_many(spec, n_samples, threads=threads)),
                       (-0.5, 0.5))
    st = empirical_count_stats(counts, (-0.5, 0.5))
    target = occupation_cov("sine1", 1.0, 0)
    tol = 3.0 * st.variance_stderr + 0.05
    return ValidationResult("sine1-bulk", "variance", st.variance, st.variance_stderr,
                            target, tol, abs(st.variance - target) <= tol, counts)


def validate_bessel4_hard_edge(s: float = 1.0, n_samples: int = 40_000, N: int = 100,
                               seed: int = 0, upper: float = 2.0,
                               threads: int | None = None) -> ValidationResult:
    """Mean count in ``(0, upper]`` at the hard edge of laguerre beta=4.

    Compared with ``int_0^upper rho1(bessel4, s)`` at 10% relative tolerance.
    """
    from .kernels import matrix_kernel, rho1
    from .quad import gl_panels

    spec = EnsembleSpec(4, "laguerre", N, seed, a=bessel4_laguerre_exponent(s))
    mode = HardEdge(N)
    counts = counts_in((rescale(c, mode) for c in sample_many(spec, n_samples, threads=threads)),
                       (0.0, upper))
    st = empirical_count_stats(counts, (0.0, upper))
    K = matrix_kernel("bessel4", s)
    br = np.unique(np.concatenate([[0.0], upper * np.geomspace(1e-8, 1.0, 40)]))
    x, w = gl_panels(br, 16)
    target = float(w @ rho1(K, x))
    tol = 0.1 * target
    return ValidationResult("bessel4-hard-edge", "mean", st.mean, st.stderr,
                            target, tol, abs(st.mean - target) <= tol, counts)


def write_counts_csv(counts: Sequence[int], fh) -> None:
    """CSV ``sample,count``."""
    fh.write("sample,count\n")
    for i, c in enumerate(counts):
        fh.write(f"{i},{int(c)}\n")


def summary_json(result: ValidationResult) -> str:
    """JSON summary of a validation run.

    Floats are written by ``repr``, the shortest string that round-trips.
    """
    c = np.asarray(result.counts, dtype=np.int64)
    st = empirical_count_stats(c, (0.0, 1.0)) if c.size >= MIN_SAMPLES else None
    doc = {
        "name": result.name,
        "statistic": result.statistic,
        "n_samples": int(c.size),
        "mean": st.mean if st else float(c.mean()) if c.size else 0.0,
        "variance": st.variance if st else 0.0,
        "stderr": st.stderr if st else 0.0,
        "variance_stderr": st.variance_stderr if st else 0.0,
        "observed": float(result.observed),
        "target": float(result.target),
        "tolerance": float(result.tolerance),
        "passed": bool(result.passed),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
