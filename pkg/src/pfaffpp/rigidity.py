"""Variance of additive statistics, defects and screening residuals.

Stationary kernels
------------------
With ``rho^(2,T)(x, y) = F(x - y)``, ``G(u) = int_u^inf F`` and
``D(u) = (1/2) int (f(x+u) - f(x))^2 dx`` the general variance formula reads

    Var S_f = A(0) (rho + 2 G(0)) - 2 int_0^inf F(u) D(u) du,   A(0) = int f^2.

Two integrations by parts turn the second term into
``2 int_0^U K(u) B(u) du`` with ``K(u) = int_0^u G`` and
``B(u) = int f'(x) f'(x+u) dx``, which is available in closed form for the
logarithmic taper. This is the route used for tapers; other compactly
supported ``f`` go through ``D`` directly.

Bessel kernels
--------------
The variance is evaluated in the compact form
``int f^2 rho1 - iint f(x) f(y) det K(x, y)`` on a tensor Gauss-Legendre grid
in ``z = sqrt(x)``. The integral entry ``K12`` along each row is obtained by
spectral cumulative integration of the same row of ``K11``.

Pointwise half-line integrals over ``y`` (defects, screening residuals) are
computed on ``[0, Z^2]`` and the partial integrals ``P(Z)`` are extrapolated
by a least-squares fit of a polynomial in ``1/Z`` (degree 4) plus damped
harmonics ``cos(k w Z)/Z^p``, ``sin(k w Z)/Z^p`` of the kernel's oscillation
in ``z`` (``w = 2`` for bessel4, ``1`` for bessel1); two fitting windows give
the error estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy import special

from .errors import ContractError, DomainError
from .kernels import MatrixKernel
from .quad import PanelRule, QuadResult, gl_panels
from .specfun import bessel_j_cumulative
from .stationary import stationary_profile

__all__ = [
    "TaperFunction",
    "AdditiveStatistic",
    "VarianceResult",
    "SweepRow",
    "indicator",
    "taper_eval",
    "variance_additive",
    "defect",
    "defect_closed_form",
    "screening_integral",
    "screening_residual",
    "screening_residual_closed_form",
    "screening_average",
    "variance_sweep",
    "write_sweep_csv",
]


# Test functions ---------------------------------------------------------------


@dataclass(frozen=True)
class TaperFunction:
    """The logarithmic cutoff ``phi^(R,T)``.

    ``1`` on ``[0, R]``, ``1 - log(x - R + 1)/log(T - R + 1)`` on ``[R, T]``
    and ``0`` beyond ``T``.
    """

    R: float
    T: float

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.T) and self.T > self.R):
            raise ContractError(f"taper needs 0 < R < T, got R={self.R}, T={self.T}")

    @property
    def log_span(self) -> float:
        return math.log(self.T - self.R + 1.0)

    def __call__(self, x):
        xa = np.abs(np.asarray(x, dtype=float))
        mid = 1.0 - np.log(np.clip(xa - self.R, 0.0, None) + 1.0) / self.log_span
        out = np.where(xa <= self.R, 1.0, np.where(xa >= self.T, 0.0, mid))
        return float(out) if np.ndim(x) == 0 else out

    def derivative_autocorrelation(self, u, two_sided: bool) -> np.ndarray:
        """``B(u) = int f'(x) f'(x + u) dx`` for ``u >= 0``.

        ``f = phi(|x|)`` when ``two_sided``, else ``phi`` on the half-line.
        """
        u = np.asarray(u, dtype=float)
        R, T = self.R, self.T
        l1 = T - R + 1.0
        inv = 1.0 / self.log_span**2
        # same-side overlap of the two 1/(x - R + 1) profiles
        us = np.where(u > 0, u, 1.0)
        same = np.where(u > 0, np.log(np.clip((l1 - u) * (1.0 + u) / l1, 1e-300, None)) / us,
                        1.0 - 1.0 / l1)
        same = np.where(u < T - R, same, 0.0)
        out = (2.0 if two_sided else 1.0) * inv * same
        if two_sided:
            c = u - 2.0 * R + 2.0
            lo = np.maximum(1.0, c - l1)
            hi = np.minimum(l1, c - 1.0)
            ok = hi > lo
            cs = np.where(ok, c, 1.0)
            cross = np.where(ok, (np.log(np.where(ok, hi, 1.0) / np.where(ok, cs - hi, 1.0))
                                  - np.log(np.where(ok, lo, 1.0) / np.where(ok, cs - lo, 1.0))) / cs,
                             0.0)
            out = out - inv * cross
        return out

    def statistic(self, two_sided: bool = False) -> "AdditiveStatistic":
        if two_sided:
            return AdditiveStatistic(self, (-self.T, self.T), (-self.R, 0.0, self.R),
                                     name=f"phi({self.R:g},{self.T:g}) two-sided",
                                     taper=self, two_sided=True)
        return AdditiveStatistic(self, (0.0, self.T), (self.R,),
                                 name=f"phi({self.R:g},{self.T:g})", taper=self)


def taper_eval(t: TaperFunction, x):
    """Value of ``phi^(R,T)`` at ``x >= 0``."""
    if np.any(np.asarray(x) < 0):
        raise DomainError("taper_eval needs x >= 0")
    return t(x)


@dataclass(frozen=True)
class AdditiveStatistic:
    """A test function ``f`` for ``S_f = sum f(x)``.

    Attributes
    ----------
    f : callable
        Vectorised, bounded.
    support : tuple or None
        ``(a, b)`` with ``f = 0`` outside; ``None`` for non-compact ``f``
        (then ``spectrum`` must be supplied).
    breakpoints : tuple
        Points where ``f`` or its derivative may jump.
    spectrum : callable, optional
        Fourier transform ``g^(lam) = int f(x) exp(-2 pi i lam x) dx`` when it
        is known in closed form (assumed real, i.e. ``f`` even).
    """

    f: Callable
    support: tuple | None
    breakpoints: tuple = ()
    name: str = "f"
    spectrum: Callable | None = field(default=None, repr=False)
    spectral_support: float | None = None
    taper: TaperFunction | None = field(default=None, repr=False)
    two_sided: bool = False

    def __post_init__(self):
        if self.support is None:
            if self.spectrum is None:
                raise ContractError("non-compact test function needs a spectrum")
        else:
            a, b = self.support
            if not (math.isfinite(a) and math.isfinite(b) and a <= b):
                raise ContractError(f"support must be a finite interval, got {self.support}")

    def __call__(self, x):
        return self.f(x)

    def _rule(self, lo=None, hi=None, n=16, width=0.5) -> PanelRule:
        a, b = self.support
        a = a if lo is None else max(a, lo)
        b = b if hi is None else min(b, hi)
        pts = [a, b] + [p for p in self.breakpoints if a < p < b]
        pts = np.unique(pts)
        br = [pts[0]]
        for left, right in zip(pts[:-1], pts[1:]):
            k = max(1, int(math.ceil((right - left) / width)))
            br.extend(np.linspace(left, right, k + 1)[1:])
        return PanelRule(np.array(br), n)

    def sq_norm(self) -> float:
        """``int f^2``."""
        if self.support is None:
            raise ContractError("sq_norm needs compact support")
        a, b = self.support
        if a == b:
            return 0.0
        r = self._rule()
        return float(r.integrate(np.asarray(self.f(r.nodes), float) ** 2))

    def fourier(self, lam) -> np.ndarray:
        """``g^(lam)`` (complex in general)."""
        lam = np.asarray(lam, dtype=float)
        if self.spectrum is not None:
            return np.asarray(self.spectrum(lam))
        a, b = self.support
        if a == b:
            return np.zeros_like(lam, dtype=complex)
        r = self._rule(width=0.125)
        fw = np.asarray(self.f(r.nodes), float) * r.weights
        ph = np.exp(-2j * math.pi * np.multiply.outer(lam, r.nodes))
        return ph @ fw


def indicator(a: float, b: float) -> AdditiveStatistic:
    """``1_[a, b)`` with its closed-form Fourier transform."""
    a, b = float(a), float(b)

    def f(x):
        xa = np.asarray(x, dtype=float)
        out = ((xa >= a) & (xa < b)).astype(float)
        return float(out) if np.ndim(x) == 0 else out

    def spec(lam):
        lam = np.asarray(lam, dtype=float)
        c = 0.5 * (a + b)
        return (b - a) * np.sinc((b - a) * lam) * np.exp(-2j * math.pi * lam * c)

    return AdditiveStatistic(f, (a, b), (), name=f"1[{a:g},{b:g})", spectrum=spec)


class VarianceResult(NamedTuple):
    value: float
    err_estimate: float


# Stationary variance ------------------------------------------------------


def _uniform_breaks(points: Iterable[float], width: float) -> np.ndarray:
    pts = np.unique(np.asarray(list(points), dtype=float))
    br = [pts[0]]
    for left, right in zip(pts[:-1], pts[1:]):
        k = max(1, int(math.ceil((right - left) / width)))
        br.extend(np.linspace(left, right, k + 1)[1:])
    return np.array(br)


def _stationary_variance(kernel: MatrixKernel, f: AdditiveStatistic, n: int, form: str) -> float:
    prof = stationary_profile(kernel)
    a, b = f.support
    span = b - a
    if span == 0:
        return 0.0
    a0 = f.sq_norm()
    if f.taper is not None and f.two_sided:
        # f continuous, so f' has no point masses and B is its full autocorrelation
        t = f.taper
        R, T = t.R, t.T
        pts = [0.0, 2 * R, T - R, T + R, 2 * T]
        top = 2 * T
        rule = PanelRule(_uniform_breaks([p for p in pts if p <= top], 0.5), n)
        u = rule.nodes
        fv = prof.F(u)
        g_top = prof.tail_integral(top) if top >= 1 else prof.G(top)
        cum = rule.cumulative(fv)
        total = rule.integrate(fv)
        g = g_top + total - cum
        g0 = g_top + total
        kk = rule.cumulative(g)
        screened = 2.0 * rule.integrate(kk * t.derivative_autocorrelation(u, True))
    else:
        rule = PanelRule(_uniform_breaks([0.0, span] + [abs(p - q) for p in (a, b, *f.breakpoints)
                                                          for q in (a, b, *f.breakpoints)
                                                          if 0 < abs(p - q) < span], 0.5), n)
        u = rule.nodes
        fv = prof.F(u)
        dvals = np.array([a0 - _overlap(f, ui, n) for ui in u])
        g_top = prof.tail_integral(span) if span >= 1 else prof.G(span)
        g0 = g_top + rule.integrate(fv)
        screened = -2.0 * rule.integrate(fv * dvals) - 2.0 * a0 * g_top
    first = a0 * (prof.rho + 2.0 * g0)
    return screened if form == "screened" else first + screened


def _overlap(f: AdditiveStatistic, u: float, n: int) -> float:
    # A(u) = int f(x) f(x + u) dx
    a, b = f.support
    lo, hi = a - u, b - u
    lo, hi = max(a, lo), min(b, hi)
    if hi <= lo:
        return 0.0
    pts = [lo, hi] + [p for p in f.breakpoints if lo < p < hi] + \
          [p - u for p in (*f.breakpoints, a, b) if lo < p - u < hi]
    nodes, weights = gl_panels(_uniform_breaks(pts, 0.5), n)
    return float(np.sum(weights * f(nodes) * f(nodes + u)))


# Bessel variance ------------------------------------------------------------


def _z_breaks(zlo: float, zhi: float, anchors: Sequence[float], width: float) -> np.ndarray:
    pts = [zlo, zhi] + [z for z in anchors if zlo < z < zhi]
    br = _uniform_breaks(pts, width)
    if zlo == 0.0:
        first = br[1]
        grade = np.geomspace(1e-6, first, 14)[:-1] if first > 1e-6 else []
        br = np.unique(np.concatenate([br, grade]))
    return br


def _bessel_variance(kernel: MatrixKernel, f: AdditiveStatistic, n: int) -> float:
    a, b = f.support
    a = max(a, 0.0)
    if b <= a:
        return 0.0
    zlo, zhi = math.sqrt(a), math.sqrt(b)
    rule = PanelRule(_z_breaks(zlo, zhi, [math.sqrt(p) for p in f.breakpoints if p > 0], 0.5), n)
    z = rule.nodes
    x = z * z
    wx = rule.weights * 2.0 * z
    fx = np.asarray(f(x), float)
    keep = fx != 0
    xi, xj = np.meshgrid(x, x, indexing="ij")
    k11 = kernel._k11(xi, xj)
    k21 = kernel._k21(xi, xj)
    # row-wise int_{zlo}^{z_j} K(x_i, t) dt in t = z^2
    run = rule.cumulative(k11 * (2.0 * z)[None, :])
    k12 = np.diag(run)[:, None] - run
    if kernel.beta == 1:
        k12 = k12 - 0.5 * np.sign(xi - xj)
    det = k11 * k11.T - k12 * k21
    fw = np.where(keep, fx * wx, 0.0)
    diag = np.diag(k11)
    return float(np.sum(fw * fx * diag) - fw @ det @ fw)


def variance_additive(kernel: MatrixKernel, f: AdditiveStatistic, *, form: str = "general",
                      resolution: int = 16) -> VarianceResult:
    """Variance of ``S_f`` under the Pfaffian process with kernel ``kernel``.

    Parameters
    ----------
    kernel : MatrixKernel
    f : AdditiveStatistic
        Compactly supported. For Bessel kernels only the part on ``(0, inf)``
        contributes.
    form : {"general", "screened"}
        ``"screened"`` drops the ``int f^2 (rho - int det)`` bracket (stationary
        kernels only), i.e. assumes perfect screening.
    resolution : int
        Gauss-Legendre points per panel; the error estimate is the change
        against a coarser rule.

    Returns
    -------
    VarianceResult
        ``(value, err_estimate)``. Values in ``[-1e-6, 0)`` are reported as 0.
    """
    if f.support is None:
        raise ContractError("variance_additive needs a compactly supported f; "
                            "use spectral.spectral_variance for Schwartz functions")
    if form not in ("general", "screened"):
        raise ContractError(f"unknown form {form!r}")
    if kernel.stationary:
        def run(n):
            return _stationary_variance(kernel, f, n, form)
    else:
        if form != "general":
            raise ContractError("the screened form only applies to stationary kernels")

        def run(n):
            return _bessel_variance(kernel, f, n)
    fine = run(resolution)
    coarse = run(max(6, resolution - 4))
    err = abs(fine - coarse)
    if -1e-6 <= fine < 0:
        fine = 0.0
    return VarianceResult(fine, err)


# Half-line row integrals ----------------------------------------------------

ROW_WIDTH = 1.0


def _bessel_rows(kernel: MatrixKernel, x: float, zmax: float, n: int = 16, width: float = 0.5):
    zx = math.sqrt(x)
    br = _z_breaks(0.0, zmax, [zx], width)
    rule = PanelRule(br, n)
    z = rule.nodes
    y = z * z
    xs = np.full_like(y, x)
    kxy = kernel._k11(xs, y)
    kyx = kernel._k11(y, xs)
    dk = kernel._k21(xs, y)
    run = rule.cumulative(kxy * 2.0 * z)
    at_x = rule.cumulative_at_breaks(kxy * 2.0 * z)[int(np.searchsorted(br, zx))]
    k12 = at_x - run
    if kernel.beta == 1:
        k12 = k12 - 0.5 * np.sign(x - y)
    return rule, z, kxy, kyx, dk, k12


def _extrapolate(zb: np.ndarray, pb: np.ndarray, omega: float, lo: float) -> float:
    m = zb >= lo
    zz, pp = zb[m], pb[m]
    cols = [zz ** -k for k in range(5)]
    for k in (1, 2):
        for p in (0.5, 1.0, 1.5, 2.0, 2.5):
            cols += [np.cos(k * omega * zz) / zz**p, np.sin(k * omega * zz) / zz**p]
    a = np.array(cols).T
    scale = np.abs(a).max(axis=0)
    coef, *_ = np.linalg.lstsq(a / scale, pp, rcond=None)
    return float(coef[0] / scale[0])


def _half_line(kernel: MatrixKernel, x: float, which: str, zmax: float | None) -> QuadResult:
    zx = math.sqrt(x)
    top = zmax if zmax is not None else 6.0 * zx + 200.0
    rule, z, kxy, kyx, dk, k12 = _bessel_rows(kernel, x, top, width=ROW_WIDTH)
    if which == "det":
        vals = kxy * kyx - k12 * dk
    else:
        vals = kxy * kyx
    part = rule.cumulative_at_breaks(vals * 2.0 * z)
    omega = 2.0 if kernel.name == "bessel4" else 1.0
    zb = rule.breaks
    w1 = _extrapolate(zb, part, omega, zx + 0.25 * (top - zx))
    w2 = _extrapolate(zb, part, omega, zx + 0.5 * (top - zx))
    return QuadResult(w2, abs(w2 - w1))


def _check_bessel_point(kernel: MatrixKernel, x) -> float:
    x = float(x)
    if not x > 0:
        raise DomainError(f"{kernel.name}: x must be positive")
    return x


def _sinc_sq_tail(v: float) -> float:
    # int_v^inf S(u)^2 du = (1/(2 pi^2)) int_v^inf (1 - cos(2 pi u))/u^2 du
    b = 2.0 * math.pi
    si, _ = special.sici(b * v)
    cos_part = math.cos(b * v) / v - b * (0.5 * math.pi - si)
    return (1.0 / v - cos_part) / (2.0 * math.pi**2)


def defect(kernel: MatrixKernel, x: float, *, zmax: float | None = None) -> QuadResult:
    """``Def(x) = int K(x,y) K(y,x) dy - K(x,x)`` for the scalar kernel of ``kernel``.

    For the sine processes the scalar kernel is ``S(x - y)``; for the Bessel
    processes it is ``K11``.
    """
    if kernel.stationary:
        v = 40.0
        nodes, w = gl_panels(np.linspace(0.0, v, 161), 16)
        val = 2.0 * (float(np.sum(w * np.sinc(nodes) ** 2)) + _sinc_sq_tail(v)) - 1.0
        return QuadResult(val, 1e-13)
    x = _check_bessel_point(kernel, x)
    res = _half_line(kernel, x, "kk", zmax)
    return QuadResult(res.value - float(kernel._k11(np.array(x), np.array(x))), res.error)


def _bessel_parts(kernel: MatrixKernel, x: float):
    s = kernel.s
    if kernel.name == "bessel4":
        a = 2.0 * s - 1.0
        z = 2.0 * math.sqrt(x)
        jv = float(special.jv(a, z))
        p = 0.5 * float(bessel_j_cumulative(a, z))      # int_0^sqrt(x) J_a(2t) dt
        return jv, p
    b = s + 1.0
    z = math.sqrt(x)
    jv = float(special.jv(b, z))
    phi = float(bessel_j_cumulative(b, z))
    return jv, phi


def defect_closed_form(kernel: MatrixKernel, x: float, *, corrected: bool = False) -> float:
    """Closed forms for the Bessel defects.

    With ``corrected=False`` the historical expressions

        bessel4: Def(x) = -(3/16) J_a(2 sqrt x)/sqrt(x) int_0^sqrt(x) J_a(2t) dt,  a = 2s-1
        bessel1: Def(x) = J_b(sqrt x)/(16 sqrt x) int_sqrt(x)^inf J_b(t) dt,        b = s+1

    are returned. ``corrected=True`` gives the forms that follow from the
    projection ``bessel2`` mapping ``J_a(2 sqrt y)`` (resp. ``J_b(sqrt y)``) to
    one half of itself:

        bessel4: Def(x) = -K_s(x,x)/2 - J_a(2 sqrt x)/(16 sqrt x) int_0^sqrt(x) J_a(2t) dt
        bessel1: Def(x) = -J_b(sqrt x)/(16 sqrt x) int_sqrt(x)^inf J_b(t) dt

    These agree with direct quadrature (see :func:`defect`). Sine kernels: 0.
    """
    if kernel.stationary:
        return 0.0
    x = _check_bessel_point(kernel, x)
    rx = math.sqrt(x)
    if kernel.name == "bessel4":
        jv, p = _bessel_parts(kernel, x)
        if corrected:
            kxx = float(kernel._k11(np.array(x), np.array(x)))
            return -0.5 * kxx - jv * p / (16.0 * rx)
        return -3.0 / 16.0 * jv / rx * p
    jv, phi = _bessel_parts(kernel, x)
    tail = 1.0 - phi
    val = jv * tail / (16.0 * rx)
    return -val if corrected else val


def screening_integral(kernel: MatrixKernel, x: float = 0.0, M: float = 100.0) -> float:
    """Symmetric truncation ``int_{x-M}^{x+M} rho^(2,T)(x, y) dy`` (sine kernels)."""
    if not kernel.stationary:
        raise ContractError("symmetric truncations are defined for the sine kernels")
    if not M > 0:
        raise ContractError("M must be positive")
    prof = stationary_profile(kernel)
    rule = PanelRule(_uniform_breaks([0.0, M], 0.25), 16)
    return float(2.0 * rule.integrate(prof.F(rule.nodes)))


def screening_residual(kernel: MatrixKernel, x: float, *, zmax: float | None = None) -> QuadResult:
    """``int det K(x, y) dy - rho1(x)`` by quadrature over the whole domain."""
    if kernel.stationary:
        prof = stationary_profile(kernel)
        g0 = prof.G(0.0)
        return QuadResult(-2.0 * g0 - prof.rho, 1e-12)
    x = _check_bessel_point(kernel, x)
    res = _half_line(kernel, x, "det", zmax)
    return QuadResult(res.value - float(kernel._k11(np.array(x), np.array(x))), res.error)


def screening_residual_closed_form(kernel: MatrixKernel, x: float, *, corrected: bool = False) -> float:
    """Historical closed forms of the screening residual.

        bessel4: J_a(2 sqrt x)/(16 sqrt x) - J_a(2 sqrt x)/(4 sqrt x) int_0^sqrt(x) J_a(2t) dt
        bessel1: J_b(sqrt x)/(8 sqrt x) (int_sqrt(x)^inf J_b - int_0^sqrt(x) J_b)

    Both are nonzero, whereas quadrature gives a vanishing residual; with
    ``corrected=True`` the value 0 (perfect screening) is returned.
    """
    if kernel.stationary or corrected:
        return 0.0
    x = _check_bessel_point(kernel, x)
    rx = math.sqrt(x)
    if kernel.name == "bessel4":
        jv, p = _bessel_parts(kernel, x)
        return jv / (16.0 * rx) - jv / (4.0 * rx) * p
    jv, phi = _bessel_parts(kernel, x)
    return jv / (8.0 * rx) * ((1.0 - phi) - phi)


def _closed_average(kernel: MatrixKernel, X: float) -> float:
    # antiderivatives of the historical residuals (telescoping)
    if kernel.name == "bessel4":
        phi = float(bessel_j_cumulative(2.0 * kernel.s - 1.0, 2.0 * math.sqrt(X)))
        return phi * (1.0 - phi) / 16.0
    phi = float(bessel_j_cumulative(kernel.s + 1.0, math.sqrt(X)))
    return phi * (1.0 - phi) / 4.0


def screening_average(kernel: MatrixKernel, X, *, method: str = "quadrature",
                      width: float = 2.0, n: int = 8) -> QuadResult | list[QuadResult]:
    """``int_0^X screening_residual(x) dx``.

    ``method="quadrature"`` integrates :func:`screening_residual` over
    ``x = z^2`` with ``n``-point Gauss-Legendre panels of width ``width`` in
    ``z``; ``method="closed_form"`` uses the antiderivative of
    :func:`screening_residual_closed_form`. ``X`` may be a sequence, in which
    case one result per entry is returned from a single pass.
    """
    xs = np.atleast_1d(np.asarray(X, dtype=float))
    if np.any(xs < 0):
        raise ContractError("X must be non-negative")
    if method not in ("quadrature", "closed_form"):
        raise ContractError(f"unknown method {method!r}")
    if kernel.stationary:
        out = [QuadResult(float(xv) * screening_residual(kernel, 0.0).value, 1e-12 * max(1.0, xv))
               for xv in xs]
    elif method == "closed_form":
        out = [QuadResult(_closed_average(kernel, xv) if xv > 0 else 0.0, 1e-12) for xv in xs]
    else:
        zs = np.sqrt(xs)
        top = float(zs.max())
        out = [QuadResult(0.0, 0.0)] * xs.size
        if top > 0:
            br = _z_breaks(0.0, top, list(zs), width)
            rule = PanelRule(br, n)
            vals = np.empty(rule.nodes.size)
            errs = np.empty(rule.nodes.size)
            for i, zi in enumerate(rule.nodes):
                r = screening_residual(kernel, zi * zi)
                vals[i], errs[i] = r.value, r.error
            w = rule.weights * 2.0 * rule.nodes
            cum = rule.cumulative_at_breaks(vals * 2.0 * rule.nodes)
            cum_err = np.concatenate([[0.0], np.cumsum(
                np.add.reduceat(np.abs(w) * errs, np.arange(0, rule.nodes.size, n)))])
            out = []
            for zv in zs:
                k = int(np.searchsorted(br, zv))
                out.append(QuadResult(float(cum[k]), float(cum_err[k])))
    return out if np.ndim(X) else out[0]


# Sweeps -----------------------------------------------------------------------


class SweepRow(NamedTuple):
    kernel: str
    s: float | None
    R: float
    T: float
    variance: float
    err_estimate: float


def variance_sweep(kernel: MatrixKernel, R: float, T_list: Sequence[float], *,
                   resolution: int = 16) -> list[SweepRow]:
    """``Var S_{phi^(R,T)}`` for each ``T``.

    Sine kernels use the mirrored taper ``phi(|x|)``, Bessel kernels the
    taper on the half-line.
    """
    ts = [float(t) for t in T_list]
    if not ts:
        raise ContractError("empty T list")
    if any(b <= a for a, b in zip(ts[:-1], ts[1:])):
        raise ContractError("T list must be strictly increasing")
    if ts[0] <= R:
        raise ContractError("every T must exceed R")
    rows = []
    for T in ts:
        f = TaperFunction(R, T).statistic(two_sided=kernel.stationary)
        v = variance_additive(kernel, f, resolution=resolution)
        rows.append(SweepRow(kernel.name, kernel.s, float(R), T, float(v.value), float(v.err_estimate)))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def write_sweep_csv(rows: Sequence[SweepRow], fh) -> None:
    """CSV with header ``kernel,s,R,T,variance,err_estimate``."""
    fh.write("kernel,s,R,T,variance,err_estimate\n")
    for r in rows:
        fh.write(",".join([r.kernel, _fmt(r.s), _fmt(r.R), _fmt(r.T),
                           _fmt(r.variance), _fmt(r.err_estimate)]) + "\n")
