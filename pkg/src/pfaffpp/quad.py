"""Quadrature: adaptive Gauss-Kronrod, oscillatory half-line tails, panels.

Integrands are vectorised callables ``f(x: ndarray) -> ndarray``. Adaptive
routines evaluate all active subintervals in one call so that a numpy
integrand pays Python overhead per refinement sweep, not per panel.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np
from scipy import special

from .errors import ContractError, DivergenceError, QuadratureError

__all__ = [
    "QuadResult",
    "IntegralSpec",
    "Periodic",
    "BesselEnvelope",
    "integrate",
    "integrate_oscillatory_tail",
    "iterated_aitken",
    "bessel_zero_estimates",
    "gl_panels",
    "graded_breaks",
    "cumulative_matrix",
    "PanelRule",
]

FINITE_REL_TOL = 1e-8
TAIL_REL_TOL = 1e-6

# 21-point Kronrod extension of the 10-point Gauss rule.
_XK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980544154, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WKRON = np.concatenate([_WK[:-1], _WK[::-1]])
_WGAUSS = np.zeros(21)
_WGAUSS[1:10:2] = _WG
_WGAUSS[11:20:2] = _WG[::-1]


class QuadResult(NamedTuple):
    value: float
    error: float


def _gk21(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (fx @ _WKRON)
    gauss = half * (fx @ _WGAUSS)
    return kron, np.abs(kron - gauss)


def integrate(f: Callable, a: float, b: float, *, abs_tol: float = 1e-13,
              rel_tol: float = FINITE_REL_TOL, breakpoints: Sequence[float] = (),
              max_intervals: int = 20000) -> QuadResult:
    """Adaptive G10/K21 quadrature of ``f`` over the finite interval [a, b].

    Intervals with the largest error estimates are bisected until the summed
    estimate ``sum |K21 - G10|`` drops below ``max(abs_tol, rel_tol*|value|)``.
    Integrable algebraic singularities at the endpoints are handled by plain
    bisection (the nodes never touch the endpoints).

    Raises
    ------
    QuadratureError
        If ``max_intervals`` is exceeded; ``.value`` holds the partial value.
    """
    if not (abs_tol > 0 and rel_tol > 0):
        raise ContractError("tolerances must be positive")
    a = float(a)
    b = float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ContractError("integrate() needs finite endpoints")
    if a == b:
        return QuadResult(0.0, 0.0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    pts = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    lo = np.array(pts[:-1])
    hi = np.array(pts[1:])
    val, err = _gk21(f, lo, hi)
    done_val = 0.0
    done_err = 0.0
    while True:
        total = done_val + val.sum()
        total_err = done_err + err.sum()
        target = max(abs_tol, rel_tol * abs(total))
        if total_err <= target:
            return QuadResult(sign * float(total), float(total_err))
        if lo.size + 1 > max_intervals:
            raise QuadratureError(
                f"adaptive quadrature hit {max_intervals} subintervals "
                f"(error {total_err:.3g} > {target:.3g})",
                value=sign * float(total), error=float(total_err))
        # retire panels too narrow to split in floating point
        tiny = (hi - lo) <= 64 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        if np.any(tiny):
            done_val += val[tiny].sum()
            done_err += err[tiny].sum()
            keep = ~tiny
            lo, hi, val, err = lo[keep], hi[keep], val[keep], err[keep]
            if lo.size == 0:
                return QuadResult(sign * float(done_val), float(done_err))
            continue
        order = np.argsort(err)[::-1]
        excess = total_err - 0.5 * target
        ncut = int(np.searchsorted(np.cumsum(err[order]), excess) + 1)
        ncut = min(ncut, order.size, max_intervals - lo.size)
        split = order[:ncut]
        keep = np.ones(lo.size, dtype=bool)
        keep[split] = False
        m = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], m])
        new_hi = np.concatenate([m, hi[split]])
        nv, ne = _gk21(f, new_lo, new_hi)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])


# Oscillatory tails ---------------------------------------------------------


@dataclass(frozen=True)
class Periodic:
    """Oscillation with zeros at ``phase + k*period/2`` (sin/cos type)."""

    period: float
    phase: float = 0.0

    def zeros_after(self, a: float) -> Iterator[float]:
        half = 0.5 * self.period
        k = math.floor((a - self.phase) / half) + 1
        while True:
            yield self.phase + k * half
            k += 1


def bessel_zero_estimates(nu: float, k: np.ndarray) -> np.ndarray:
    """Positive zeros j_{nu,k} (k = 1, 2, ...) from McMahon plus one Newton step."""
    k = np.asarray(k, dtype=float)
    beta = (k + 0.5 * nu - 0.25) * np.pi
    mu = 4.0 * nu * nu
    z = beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta) ** 3)
    jz = special.jv(nu, z)
    dz = 0.5 * (special.jv(nu - 1.0, z) - special.jv(nu + 1.0, z))
    return z - jz / dz


@dataclass(frozen=True)
class BesselEnvelope:
    """Oscillation of ``J_nu(scale * t**power)``; splits at its zeros in t."""

    nu: float
    scale: float = 1.0
    power: float = 1.0

    def zeros_after(self, a: float) -> Iterator[float]:
        k0 = 1
        # first index whose asymptotic zero location lies beyond a
        arg = self.scale * max(a, 0.0) ** self.power
        k0 = max(1, int(arg / np.pi - 0.5 * self.nu + 0.25) - 1)
        while True:
            ks = np.arange(k0, k0 + 64)
            z = bessel_zero_estimates(self.nu, ks)
            t = (z / self.scale) ** (1.0 / self.power)
            for tk in t:
                if tk > a:
                    yield float(tk)
            k0 += 64


def iterated_aitken(s: np.ndarray, depth: int = 4) -> np.ndarray:
    """Repeated Aitken delta-squared transform of a sequence of partial sums."""
    s = np.asarray(s, dtype=float)
    for _ in range(depth):
        if s.size < 3:
            break
        d2 = s[2:] - 2.0 * s[1:-1] + s[:-2]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = s[2:] - (s[2:] - s[1:-1]) ** 2 / d2
        bad = ~np.isfinite(t) | (np.abs(d2) < 1e-300)
        t = np.where(bad, s[2:], t)
        s = t
    return s


def _lobes(f, zeros: Sequence[float]) -> np.ndarray:
    z = np.asarray(zeros, dtype=float)
    lo, hi = z[:-1], z[1:]
    val, err = _gk21(f, lo, hi)
    rough = err > 1e-10 * np.maximum(np.abs(val), 1e-300) + 1e-15
    for i in np.flatnonzero(rough):
        val[i] = integrate(f, lo[i], hi[i], rel_tol=1e-11, abs_tol=1e-15).value
    return val


def integrate_oscillatory_tail(f: Callable, a: float, oscillation, *,
                               abs_tol: float = 1e-10, rel_tol: float = TAIL_REL_TOL,
                               chunk: int = 32, max_lobes: int = 20000) -> QuadResult:
    """Integrate ``f`` over [a, inf) when ``f`` = decaying envelope x oscillation.

    The half-line is cut at consecutive zeros of the oscillatory factor
    (``oscillation.zeros_after(a)``), each lobe is integrated by Gauss-Kronrod,
    and the alternating sequence of partial sums is accelerated with iterated
    Aitken transforms. The error estimate is the spread of the last few
    accelerated values.

    Raises
    ------
    DivergenceError
        If lobe magnitudes grow, i.e. the envelope does not decay.
    QuadratureError
        If ``max_lobes`` lobes do not reach the tolerance.
    """
    gen = oscillation.zeros_after(float(a))
    first = next(gen)
    head = integrate(f, a, first, rel_tol=1e-11, abs_tol=1e-15).value if first > a else 0.0
    zeros = [first]
    lobes = np.empty(0)
    best = head
    while lobes.size < max_lobes:
        zeros.extend(next(gen) for _ in range(chunk))
        new = _lobes(f, zeros[-chunk - 1:])
        lobes = np.concatenate([lobes, new])
        mags = np.abs(lobes)
        # the envelope must visibly decay; otherwise Aitken would happily
        # return an Abel-type sum of a divergent series
        q = max(2, mags.size // 4)
        early = float(np.mean(mags[:q]))
        late = float(np.mean(mags[-q:]))
        decaying = late < (1.0 - 1e-3) * early or late < 1e-15
        if not decaying:
            if late > early:
                raise DivergenceError("oscillatory tail: lobe magnitudes are growing",
                                      value=float(head + lobes.sum()), error=float("inf"))
            if lobes.size >= 4 * chunk:
                raise DivergenceError("oscillatory tail: lobe magnitudes do not decay",
                                      value=float(head + lobes.sum()), error=float("inf"))
            continue
        if not np.any(mags > 0):
            if mags.size >= chunk:
                return QuadResult(float(head), 0.0)
            continue
        partial = head + np.cumsum(lobes)
        window = partial[-min(partial.size, 24):]
        acc = iterated_aitken(window, depth=min(4, (window.size - 1) // 2))
        if acc.size >= 3:
            best = float(acc[-1])
            err = float(np.max(np.abs(np.diff(acc[-3:]))))
            err = max(err, 1e-16 * abs(best))
            if err <= max(abs_tol, rel_tol * abs(best)):
                return QuadResult(best, err)
    raise QuadratureError("oscillatory tail did not converge", value=best, error=float("nan"))


# Composite Gauss-Legendre panels ------------------------------------------


def gl_panels(breaks: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an ``n``-point Gauss-Legendre rule on each panel."""
    x, w = np.polynomial.legendre.leggauss(n)
    b = np.asarray(breaks, dtype=float)
    half = 0.5 * np.diff(b)
    mid = 0.5 * (b[1:] + b[:-1])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def graded_breaks(a: float, b: float, width: float, anchors: Sequence[float] = (),
                  grade_at: Sequence[float] = (), min_width: float = 1e-3) -> np.ndarray:
    """Panel breakpoints on [a, b] of roughly ``width``, refined geometrically.

    ``anchors`` are forced breakpoints; near each point in ``grade_at`` the
    panels shrink geometrically (ratio 2) down to ``min_width``.
    """
    pts = {float(a), float(b)}
    pts.update(float(p) for p in anchors if a < p < b)
    for g in grade_at:
        h = min_width
        while h < width:
            for p in (g - h, g + h):
                if a < p < b:
                    pts.add(float(p))
            h *= 2.0
        if a <= g <= b:
            pts.add(float(g))
    coarse = sorted(pts)
    out = [coarse[0]]
    for lo, hi in zip(coarse[:-1], coarse[1:]):
        m = max(1, int(math.ceil((hi - lo) / width - 1e-9)))
        out.extend(np.linspace(lo, hi, m + 1)[1:].tolist())
    return np.array(out)


def cumulative_matrix(n: int) -> np.ndarray:
    """Spectral integration matrix for ``n``-point Gauss-Legendre on [-1, 1].

    ``Q @ f(nodes)`` approximates ``int_{-1}^{t_i} f`` at every node ``t_i``
    by integrating the degree ``n-1`` interpolant.
    """
    t, _ = np.polynomial.legendre.leggauss(n)
    # Legendre-Vandermonde, then integrate each basis polynomial from -1
    V = np.polynomial.legendre.legvander(t, n - 1)
    coef_to_vals = np.linalg.inv(V)
    Q = np.empty((n, n))
    for j in range(n):
        c = coef_to_vals[:, j]
        ci = np.polynomial.legendre.legint(c, lbnd=-1.0)
        Q[:, j] = np.polynomial.legendre.legval(t, ci)
    return Q


@dataclass
class IntegralSpec:
    """A one-dimensional integral and how to evaluate it.

    ``b = inf`` selects the oscillatory tail routine, which needs an
    ``oscillation`` hint (:class:`Periodic` or :class:`BesselEnvelope`).
    """

    integrand: Callable
    a: float
    b: float = math.inf
    abs_tol: float = 1e-12
    rel_tol: float | None = None
    oscillation: object | None = None
    breakpoints: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        if self.abs_tol <= 0 or (self.rel_tol is not None and self.rel_tol <= 0):
            raise ContractError("tolerances must be positive")
        if math.isfinite(self.b) and self.b < self.a:
            raise ContractError("finite endpoints must be ordered")

    def evaluate(self) -> QuadResult:
        if math.isfinite(self.b):
            return integrate(self.integrand, self.a, self.b, abs_tol=self.abs_tol,
                             rel_tol=self.rel_tol or FINITE_REL_TOL,
                             breakpoints=self.breakpoints)
        if self.oscillation is None:
            raise ContractError("half-line integrals need an oscillation hint")
        return integrate_oscillatory_tail(self.integrand, self.a, self.oscillation,
                                          abs_tol=self.abs_tol,
                                          rel_tol=self.rel_tol or TAIL_REL_TOL)


@lru_cache(maxsize=32)
def _cumulative_cached(n: int) -> np.ndarray:
    q = cumulative_matrix(n)
    q.setflags(write=False)
    return q


class PanelRule:
    """Composite ``n``-point Gauss-Legendre rule on fixed panels.

    Besides plain integration it offers spectrally accurate running integrals
    ``int_{a}^{node} f`` at every node, which the Bessel kernel rows and the
    stationary tail integrals are built from.
    """

    def __init__(self, breaks: Sequence[float], n: int = 16):
        self.breaks = np.asarray(breaks, dtype=float)
        if self.breaks.ndim != 1 or self.breaks.size < 2 or np.any(np.diff(self.breaks) <= 0):
            raise ContractError("panel breaks must be strictly increasing")
        self.n = int(n)
        self.nodes, self.weights = gl_panels(self.breaks, self.n)
        self.npanel = self.breaks.size - 1
        self.half = 0.5 * np.diff(self.breaks)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integral over the whole rule of values sampled at the nodes (last axis)."""
        return values @ self.weights

    def cumulative(self, values: np.ndarray) -> np.ndarray:
        """Running integral from the left end to each node (last axis)."""
        v = np.asarray(values, dtype=float)
        shape = v.shape
        v = v.reshape(-1, self.npanel, self.n)
        q = _cumulative_cached(self.n)
        inner = (v @ q.T) * self.half[None, :, None]
        totals = inner[..., -1] + (v @ (self._tail_weights())) * self.half[None, :]
        offset = np.concatenate([np.zeros((v.shape[0], 1)), np.cumsum(totals, axis=1)[:, :-1]], axis=1)
        return (inner + offset[..., None]).reshape(shape)

    def cumulative_at_breaks(self, values: np.ndarray) -> np.ndarray:
        """Running integral at every panel break (``npanel + 1`` values)."""
        v = np.asarray(values, dtype=float)
        lead = v.shape[:-1]
        v = v.reshape(-1, self.npanel, self.n)
        _, w = np.polynomial.legendre.leggauss(self.n)
        totals = (v @ w) * self.half[None, :]
        out = np.concatenate([np.zeros((v.shape[0], 1)), np.cumsum(totals, axis=1)], axis=1)
        return out.reshape(lead + (self.npanel + 1,))

    @lru_cache(maxsize=1)
    def _tail_weights(self) -> np.ndarray:
        # weights of int_{t_last}^{1} of the interpolant
        t, w = np.polynomial.legendre.leggauss(self.n)
        return w - _cumulative_cached(self.n)[-1]
