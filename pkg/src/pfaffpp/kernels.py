"""Sine and Bessel kernels, their 2x2 Pfaffian matrix forms, and correlations.

Scalar kernels
--------------
``bessel2(a, x, y)`` is the determinantal Bessel kernel

    (sqrt(x) J_{a+1}(sqrt x) J_a(sqrt y) - sqrt(y) J_{a+1}(sqrt y) J_a(sqrt x)) / (2(x - y)),

which also equals ``(1/2) int_0^1 v J_a(v sqrt x) J_a(v sqrt y) dv``. The
quotient loses digits as ``sqrt x - sqrt y -> 0``; there the integral form is
evaluated with Gauss-Jacobi nodes for the weight ``v^(2a+1)`` (exact endpoint
behaviour, entire remaining factor).

Matrix kernels
--------------
Entries are ``K11, K12, K21, K22`` with ``K22(x, y) = K11(y, x)`` and ``K12``,
``K21`` antisymmetric. The integral entries of the Bessel kernels are
computed through antisymmetric one-dimensional representations on [0, 1]::

    bessel4:  int_y^x K_s(x,t) dt = (M(y,x) - M(x,y)) / 2,
              M(x,y) = sqrt(x) int_0^1 J_a(2v sqrt x) Phi_a(2v sqrt y) dv,  a = 2s-1
    bessel1:  int_y^x K_{1,s}(x,t) dt = (N(y,x) - N(x,y))/2 + (Phi_b(sqrt x) - Phi_b(sqrt y))/2,
              N(x,y) = sqrt(x) int_0^1 J_b(v sqrt x) Phi_b(v sqrt y) dv,  b = s+1

where ``Phi_nu(z) = int_0^z J_nu``. Both follow from the integral form of
``bessel2`` and ``int_0^1 d/dv[Phi(v p) Phi(v q)] dv = Phi(p) Phi(q)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy import special

from .errors import ContractError, DomainError
from .pfaffian import pfaffian_ex
from .specfun import bessel_j_cumulative, sine_kernel_parts

__all__ = [
    "MatrixKernel",
    "ScalarKernel",
    "CorrelationResult",
    "KERNEL_NAMES",
    "bessel2",
    "bessel2_d1",
    "bessel4_scalar",
    "bessel4_dx",
    "bessel4_int",
    "bessel1_scalar",
    "bessel1_dx",
    "bessel1_int",
    "matrix_kernel",
    "scalar_kernel",
    "rho1",
    "rho2_truncated",
    "correlation",
]

KERNEL_NAMES = ("sine1", "sine4", "bessel1", "bessel4")

# switch to the integral form when |sqrt x - sqrt y| < GAP * min(1, max sqrt)
VALUE_GAP = 1e-3
DERIV_GAP = 2e-2


# Gauss-Jacobi machinery -------------------------------------------------------


def _bucket(n: float) -> int:
    n = max(32, int(math.ceil(n)))
    p = 1 << (n - 1).bit_length()
    return p * 3 // 4 if p * 3 // 4 >= n else p


@lru_cache(maxsize=256)
def _jacobi01(n: int, beta: float):
    # nodes/weights for int_0^1 v^beta f(v) dv
    t, w = special.roots_jacobi(n, 0.0, beta)
    v = 0.5 * (1.0 + t)
    w = w * 0.5 ** (beta + 1.0)
    v.setflags(write=False)
    w.setflags(write=False)
    return v, w


def _jacobi_apply(beta: float, npts: np.ndarray, integrand: Callable, *args) -> np.ndarray:
    """sum_j w_j f(v_j, args...) per row, grouping rows by node count."""
    out = np.empty(npts.shape[0])
    sizes = np.array([_bucket(n) for n in npts])
    for n in np.unique(sizes):
        rows = np.flatnonzero(sizes == n)
        v, w = _jacobi01(int(n), float(beta))
        # keep the working block near 4e6 doubles
        step = max(1, 4_000_000 // int(n))
        for lo in range(0, rows.size, step):
            r = rows[lo:lo + step]
            vals = integrand(v[None, :], *(arg[r, None] for arg in args))
            out[r] = vals @ w
    return out


def _jhat(nu: float, z):
    # J_nu(z) / z^nu, continuous at 0
    z = np.asarray(z, dtype=float)
    zs = np.where(z == 0, 1.0, z)
    out = special.jv(nu, zs) / zs**nu
    return np.where(z == 0, 1.0 / (2.0**nu * math.gamma(nu + 1.0)), out)


# Scalar Bessel kernel --------------------------------------------------------


def _check_order(a: float) -> float:
    a = float(a)
    if not a > -1.0:
        raise DomainError(f"Bessel kernel order must satisfy a > -1, got {a}")
    return a


def _positive(*arrs):
    out = [np.asarray(v, dtype=float) for v in arrs]
    for v in out:
        if np.any(~(v > 0)):
            raise DomainError("Bessel kernel arguments must be positive")
    return np.broadcast_arrays(*out)


def _unbox(ref, out):
    return float(out) if all(np.ndim(r) == 0 for r in ref) else out


def _k2_integral(a: float, zx: np.ndarray, zy: np.ndarray) -> np.ndarray:
    # (1/2) int_0^1 v J_a(v zx) J_a(v zy) dv, weight v^(2a+1)
    def f(v, p, q):
        return 0.5 * (p * q) ** a * _jhat(a, v * p) * _jhat(a, v * q)
    return _jacobi_apply(2.0 * a + 1.0, 0.6 * (zx + zy) + 24.0, f, zx, zy)


def _k2_d1_integral(a: float, zx: np.ndarray, zy: np.ndarray) -> np.ndarray:
    # d/dX of the integral form at X = zx^2:
    # (a/(2X)) K - (1/(4 zx)) int_0^1 v^2 J_{a+1}(v zx) J_a(v zy) dv
    def g(v, p, q):
        return v * v * p ** (a + 1.0) * q**a * _jhat(a + 1.0, v * p) * _jhat(a, v * q)
    rest = _jacobi_apply(2.0 * a + 1.0, 0.6 * (zx + zy) + 24.0, g, zx, zy)
    return a / (2.0 * zx**2) * _k2_integral(a, zx, zy) - rest / (4.0 * zx)


def _near(zx, zy, gap):
    return np.abs(zx - zy) < gap * np.minimum(1.0, np.maximum(zx, zy))


def _k2(a: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    zx, zy = np.sqrt(x), np.sqrt(y)
    near = _near(zx, zy, VALUE_GAP)
    out = np.empty(np.shape(x))
    far = ~near
    if np.any(far):
        px, py = zx[far], zy[far]
        num = (px * special.jv(a + 1.0, px) * special.jv(a, py)
               - py * special.jv(a + 1.0, py) * special.jv(a, px))
        out[far] = num / (2.0 * (x[far] - y[far]))
    if np.any(near):
        out[near] = _k2_integral(a, zx[near], zy[near])
    return out


def _k2_d1(a: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    zx, zy = np.sqrt(x), np.sqrt(y)
    near = _near(zx, zy, DERIV_GAP)
    out = np.empty(np.shape(x))
    far = ~near
    if np.any(far):
        px, py = zx[far], zy[far]
        ja_x, ja1_x = special.jv(a, px), special.jv(a + 1.0, px)
        ja_y, ja1_y = special.jv(a, py), special.jv(a + 1.0, py)
        d = x[far] - y[far]
        num = px * ja1_x * ja_y - py * ja1_y * ja_x
        g_prime = 0.5 * ja_x - a * ja1_x / (2.0 * px)
        h_prime = ((a / px) * ja_x - ja1_x) / (2.0 * px)
        dnum = g_prime * ja_y - py * ja1_y * h_prime
        out[far] = dnum / (2.0 * d) - num / (2.0 * d * d)
    if np.any(near):
        out[near] = _k2_d1_integral(a, zx[near], zy[near])
    return out


def bessel2(a: float, x, y):
    """Determinantal Bessel kernel of order ``a`` at (x, y); x, y > 0.

    Examples
    --------
    >>> round(bessel2(1.0, 1.0, 2.0), 12) == round(bessel2(1.0, 2.0, 1.0), 12)
    True
    """
    a = _check_order(a)
    xa, ya = _positive(x, y)
    return _unbox((x, y), _k2(a, xa, ya))


def bessel2_d1(a: float, x, y):
    """Partial derivative of :func:`bessel2` in its first argument."""
    a = _check_order(a)
    xa, ya = _positive(x, y)
    return _unbox((x, y), _k2_d1(a, xa, ya))


def bessel2_diagonal(a: float, x):
    """Closed form of ``bessel2(a, x, x)``:
    (J_a^2 + J_{a+1}^2 - (2a/z) J_a J_{a+1}) / 4 with z = sqrt(x)."""
    a = _check_order(a)
    (xa,) = _positive(x)
    z = np.sqrt(xa)
    ja, ja1 = special.jv(a, z), special.jv(a + 1.0, z)
    return _unbox((x,), 0.25 * (ja * ja + ja1 * ja1 - 2.0 * a / z * ja * ja1))


# Symplectic Bessel ------------------------------------------------------------


def _check_s(s: float) -> float:
    s = float(s)
    if not s > 0:
        raise DomainError(f"Bessel parameter s must be positive, got {s}")
    return s


def _nonneg_pos(x, y):
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(~(xa >= 0)) or np.any(~(ya > 0)):
        raise DomainError("need x >= 0 and y > 0")
    return np.broadcast_arrays(xa, ya)


def _c_half(a: float, x):
    # C(x) = int_0^{sqrt x} J_a(2t) dt = Phi_a(2 sqrt x) / 2
    return 0.5 * bessel_j_cumulative(a, 2.0 * np.sqrt(x))


def _b4(s: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a = 2.0 * s - 1.0
    out = np.zeros(np.shape(x))
    pos = x > 0
    if np.any(pos):
        out[pos] = 2.0 * np.sqrt(x[pos] / y[pos]) * _k2(a, 4.0 * x[pos], 4.0 * y[pos])
    ry = 2.0 * np.sqrt(y)
    return out - special.jv(a, ry) / ry * _c_half(a, x)


def bessel4_scalar(s: float, x, y):
    """Scalar kernel K_s of the symplectic Bessel process.

    ``K_s(x, y) = 2 sqrt(x/y) B_{2s-1}(4x, 4y) - J_{2s-1}(2 sqrt y)/(2 sqrt y) * C(x)``
    with ``B`` = :func:`bessel2` and ``C(x) = int_0^{sqrt x} J_{2s-1}(2t) dt``.
    Accepts ``x = 0`` (where the kernel vanishes); ``y`` must be positive.
    """
    s = _check_s(s)
    xa, ya = _nonneg_pos(x, y)
    return _unbox((x, y), _b4(s, xa, ya))


def _b4_dx(s: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a = 2.0 * s - 1.0
    sxy = np.sqrt(x * y)
    rx, ry = 2.0 * np.sqrt(x), 2.0 * np.sqrt(y)
    return (_k2(a, 4.0 * x, 4.0 * y) / sxy
            + 8.0 * np.sqrt(x / y) * _k2_d1(a, 4.0 * x, 4.0 * y)
            - special.jv(a, ry) * special.jv(a, rx) / (4.0 * sxy))


def bessel4_dx(s: float, x, y):
    """d/dx K_s(x, y) in closed form; x, y > 0."""
    s = _check_s(s)
    xa, ya = _positive(x, y)
    return _unbox((x, y), _b4_dx(s, xa, ya))


def _m_integral(nu: float, scale: float, zx: np.ndarray, zy: np.ndarray) -> np.ndarray:
    # zx * int_0^1 J_nu(scale v zx) Phi_nu(scale v zy) dv ; weight v^(2nu+1)
    beta = 2.0 * nu + 1.0

    def f(v, p, q):
        jx = p**nu * _jhat(nu, scale * v * p) * scale**nu
        arg = scale * v * q
        phi = bessel_j_cumulative(nu, np.broadcast_to(arg, np.broadcast(v, q).shape))
        return p * jx * phi / v ** (nu + 1.0)

    return _jacobi_apply(beta, 0.6 * scale * (zx + zy) + 24.0, f, zx, zy)


def _b4_int(s: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a = 2.0 * s - 1.0
    shape = np.shape(x)
    zx, zy = np.sqrt(x).ravel(), np.sqrt(y).ravel()
    m_xy = _m_integral(a, 2.0, zx, zy)
    m_yx = _m_integral(a, 2.0, zy, zx)
    return (0.5 * (m_yx - m_xy)).reshape(shape)


def bessel4_int(s: float, x, y):
    """int_y^x K_s(x, t) dt (the K12 entry of the symplectic Bessel kernel)."""
    s = _check_s(s)
    xa, ya = _positive(x, y)
    return _unbox((x, y), _b4_int(s, xa, ya))


# Orthogonal Bessel ------------------------------------------------------------


def _b1(s: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    b = s + 1.0
    out = np.zeros(np.shape(x))
    pos = x > 0
    if np.any(pos):
        out[pos] = np.sqrt(x[pos] / y[pos]) * _k2(b, x[pos], y[pos])
    zy = np.sqrt(y)
    tail = 1.0 - bessel_j_cumulative(b, np.sqrt(x))
    return out + special.jv(b, zy) / (4.0 * zy) * tail


def bessel1_scalar(s: float, x, y):
    """Scalar kernel K_{1,s} of the orthogonal Bessel process.

    ``K_{1,s}(x, y) = sqrt(x/y) B_{s+1}(x, y) + J_{s+1}(sqrt y)/(4 sqrt y) * int_{sqrt x}^inf J_{s+1}``.
    Accepts ``x = 0``; ``y`` must be positive.
    """
    s = _check_s(s)
    xa, ya = _nonneg_pos(x, y)
    return _unbox((x, y), _b1(s, xa, ya))


def _b1_dx(s: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    b = s + 1.0
    sxy = np.sqrt(x * y)
    zx, zy = np.sqrt(x), np.sqrt(y)
    return (_k2(b, x, y) / (2.0 * sxy)
            + np.sqrt(x / y) * _k2_d1(b, x, y)
            - special.jv(b, zy) * special.jv(b, zx) / (8.0 * sxy))


def bessel1_dx(s: float, x, y):
    """d/dx K_{1,s}(x, y) in closed form; x, y > 0."""
    s = _check_s(s)
    xa, ya = _positive(x, y)
    return _unbox((x, y), _b1_dx(s, xa, ya))


def _b1_int(s: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    b = s + 1.0
    shape = np.shape(x)
    zx, zy = np.sqrt(x).ravel(), np.sqrt(y).ravel()
    n_xy = _m_integral(b, 1.0, zx, zy)
    n_yx = _m_integral(b, 1.0, zy, zx)
    p = bessel_j_cumulative(b, zx)
    q = bessel_j_cumulative(b, zy)
    return (0.5 * (n_yx - n_xy) + 0.5 * (p - q)).reshape(shape)


def bessel1_int(s: float, x, y):
    """int_y^x K_{1,s}(x, t) dt (without the sign-function term)."""
    s = _check_s(s)
    xa, ya = _positive(x, y)
    return _unbox((x, y), _b1_int(s, xa, ya))


# Kernel objects ----------------------------------------------------------------


@dataclass(frozen=True)
class ScalarKernel:
    """A symmetric determinantal kernel ``k(x, y)``."""

    name: str
    a: float | None
    evaluator: Callable = field(repr=False)

    def __call__(self, x, y):
        return self.evaluator(x, y)


def scalar_kernel(name: str, a: float | None = None) -> ScalarKernel:
    """``"sine2"`` (``sin(pi(x-y))/(pi(x-y))``) or ``"bessel2"`` with order ``a``."""
    if name == "sine2":
        def ev(x, y):
            return np.sinc(np.asarray(x, float) - np.asarray(y, float))
        return ScalarKernel("sine2", None, ev)
    if name == "bessel2":
        if a is None:
            raise ContractError("bessel2 needs an order a")
        a = _check_order(a)
        return ScalarKernel("bessel2", a, lambda x, y: bessel2(a, x, y))
    raise ContractError(f"unknown scalar kernel {name!r}")


@dataclass(frozen=True)
class MatrixKernel:
    """2x2 Pfaffian matrix kernel.

    Attributes
    ----------
    name : str
        One of ``sine1``, ``sine4``, ``bessel1``, ``bessel4``.
    s : float or None
        Bessel parameter.
    beta : int
        1 (orthogonal) or 4 (symplectic).
    domain : tuple
        ``(-inf, inf)`` for sine kernels, ``(0, inf)`` for Bessel kernels.
    stationary : bool
        True when entries depend on ``x - y`` only.
    """

    name: str
    s: float | None
    beta: int
    domain: tuple
    stationary: bool
    _k11: Callable = field(repr=False)
    _k12: Callable = field(repr=False)
    _k21: Callable = field(repr=False)

    def _args(self, x, y):
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        lo = self.domain[0]
        if lo == 0.0 and (np.any(~(xa > 0)) or np.any(~(ya > 0))):
            raise DomainError(f"{self.name}: points must be positive")
        if np.any(~np.isfinite(xa)) or np.any(~np.isfinite(ya)):
            raise DomainError(f"{self.name}: points must be finite")
        xa, ya = np.broadcast_arrays(xa, ya)
        return xa, ya, np.ndim(x) == 0 and np.ndim(y) == 0

    def k11(self, x, y):
        xa, ya, sc = self._args(x, y)
        out = self._k11(xa, ya)
        return float(out) if sc else out

    def k22(self, x, y):
        return self.k11(y, x)

    def k12(self, x, y):
        xa, ya, sc = self._args(x, y)
        out = self._k12(xa, ya)
        return float(out) if sc else out

    def k21(self, x, y):
        xa, ya, sc = self._args(x, y)
        out = self._k21(xa, ya)
        return float(out) if sc else out

    def __call__(self, x, y) -> np.ndarray:
        """Matrix values with shape ``broadcast(x, y).shape + (2, 2)``."""
        xa, ya, _ = self._args(x, y)
        out = np.empty(xa.shape + (2, 2))
        out[..., 0, 0] = self._k11(xa, ya)
        out[..., 0, 1] = self._k12(xa, ya)
        out[..., 1, 0] = self._k21(xa, ya)
        out[..., 1, 1] = self._k11(ya, xa)
        return out

    def det(self, x, y):
        """det K(x, y) = K11 K22 - K12 K21."""
        xa, ya, sc = self._args(x, y)
        out = (self._k11(xa, ya) * self._k11(ya, xa)
               - self._k12(xa, ya) * self._k21(xa, ya))
        return float(out) if sc else out


def _sine(beta: int) -> MatrixKernel:
    c = 0.5 if beta == 4 else 1.0

    def k11(x, y):
        return c * np.sinc(x - y)

    def k12(x, y):
        _, _, isx, eps = sine_kernel_parts(x - y)
        return c * (isx - eps) if beta == 1 else c * isx

    def k21(x, y):
        _, ds, _, _ = sine_kernel_parts(x - y)
        return c * ds

    return MatrixKernel(f"sine{beta}", None, beta, (-math.inf, math.inf), True, k11, k12, k21)


def matrix_kernel(name: str, s: float | None = None) -> MatrixKernel:
    """Build one of the four Pfaffian kernels.

    ``sine1`` = [[S, IS - eps], [S', S]] and ``sine4`` = (1/2) [[S, IS], [S', S]]
    evaluated at ``x - y``. ``bessel4`` = [[K_s(x,y), int_y^x K_s(x,t) dt],
    [d/dx K_s(x,y), K_s(y,x)]] with no extra 1/2, and ``bessel1`` = [[K_{1,s},
    int_y^x K_{1,s}(x,t) dt - eps(x-y)], [d/dx K_{1,s}, K_{1,s}(y,x)]].

    Raises
    ------
    ContractError
        Unknown name, or a Bessel kernel without ``s``.
    """
    if name == "sine1":
        return _sine(1)
    if name == "sine4":
        return _sine(4)
    if name not in ("bessel1", "bessel4"):
        raise ContractError(f"unknown kernel {name!r}; expected one of {KERNEL_NAMES}")
    if s is None:
        raise ContractError(f"{name} needs the parameter s")
    s = _check_s(s)
    if name == "bessel4":
        return MatrixKernel("bessel4", s, 4, (0.0, math.inf), False,
                            lambda x, y: _b4(s, x, y),
                            lambda x, y: _b4_int(s, x, y),
                            lambda x, y: _b4_dx(s, x, y))

    def k12(x, y):
        return _b1_int(s, x, y) - 0.5 * np.sign(x - y)

    return MatrixKernel("bessel1", s, 1, (0.0, math.inf), False,
                        lambda x, y: _b1(s, x, y), k12,
                        lambda x, y: _b1_dx(s, x, y))


def rho1(kernel: MatrixKernel, x):
    """One-point density K11(x, x)."""
    return kernel.k11(x, x)


def rho2_truncated(kernel: MatrixKernel, x, y):
    """Truncated two-point function ``-det K(x, y)``."""
    return -kernel.det(x, y)


class CorrelationResult(NamedTuple):
    value: float
    degenerate: bool


def correlation_matrix(kernel: MatrixKernel, points) -> np.ndarray:
    """The 2k x 2k antisymmetric matrix [K(x_i, x_j) J], J = [[0, 1], [-1, 0]]."""
    pts = np.asarray(points, dtype=float).ravel()
    xi, xj = np.meshgrid(pts, pts, indexing="ij")
    kv = kernel(xi, xj)
    k = pts.size
    a = np.empty((2 * k, 2 * k))
    a[0::2, 0::2] = -kv[..., 0, 1]
    a[0::2, 1::2] = kv[..., 0, 0]
    a[1::2, 0::2] = -kv[..., 1, 1]
    a[1::2, 1::2] = kv[..., 1, 0]
    return 0.5 * (a - a.T)


def correlation(kernel: MatrixKernel, points) -> CorrelationResult:
    """k-point correlation function ``Pf[K(x_i, x_j) J]``.

    Coincident points give ``CorrelationResult(0.0, True)``.
    """
    pts = np.asarray(points, dtype=float).ravel()
    if pts.size == 0:
        raise ContractError("need at least one point")
    srt = np.sort(pts)
    if np.any(np.diff(srt) <= 1e-12 * np.maximum(1.0, np.abs(srt[1:]))):
        return CorrelationResult(0.0, True)
    res = pfaffian_ex(correlation_matrix(kernel, pts))
    return CorrelationResult(res.value, res.degenerate)
