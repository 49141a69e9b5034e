"""Spectral measures of linear statistics for the stationary sine processes.

For a stationary Pfaffian process with intensity ``rho`` and truncated pair
correlation ``F``, the covariance of ``S_g`` and its translates has spectral
density ``|g^(lam)|^2 (F^(lam) + rho)``. Rigidity follows when
``0 <= F^(lam) + rho <= C |lam|`` near ``lam = 0``, by building test functions
whose Fourier transforms concentrate at 0 (:func:`build_mollifier`).
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .errors import ContractError, ResourceError
from .quad import PanelRule, gl_panels
from .rigidity import AdditiveStatistic
from .stationary import StationaryProfile, stationary_profile

__all__ = [
    "StationaryProfile",
    "stationary_profile",
    "fhat",
    "closed_form_fhat_delta",
    "spectral_density",
    "spectral_variance",
    "LinearBoundReport",
    "check_linear_bound",
    "Mollifier",
    "build_mollifier",
    "write_spectral_csv",
]


def _profile(p) -> StationaryProfile:
    return p if isinstance(p, StationaryProfile) else stationary_profile(p)


def fhat(profile, lam):
    """Fourier transform of ``F``, numerically (truncation ``X = 1e4`` plus analytic tail)."""
    return _profile(profile).fhat(lam)


def closed_form_fhat_delta(process: str, lam):
    """``F^(lam) - F^(0)`` from the known piecewise closed forms.

    sine1::

        2|l| - |l| log(1 + 2|l|)            |l| <= 1
        2 - |l| log((2|l| + 1)/(2|l| - 1))  |l| >= 1

    sine4::

        |l|/2 - (|l|/4) log|1 - 2|l||        |l| <= 1
        1/2                                  |l| >= 1

    The sine4 branch is ``+inf`` at ``|l| = 1/2``.
    """
    name = getattr(process, "process", getattr(process, "name", process))
    la = np.abs(np.asarray(lam, dtype=float))
    if name == "sine1":
        small = la <= 1.0
        lb = np.where(small, 2.0, la)
        out = np.where(small, 2.0 * la - la * np.log1p(2.0 * la),
                       2.0 - lb * np.log((2.0 * lb + 1.0) / (2.0 * lb - 1.0)))
    elif name == "sine4":
        gap = np.abs(1.0 - 2.0 * la)
        with np.errstate(divide="ignore"):
            lg = np.where(gap > 0, np.log(np.where(gap > 0, gap, 1.0)), -np.inf)
        out = np.where(la <= 1.0, 0.5 * la - 0.25 * la * lg, 0.5)
    else:
        raise ContractError(f"no closed form for {name!r}")
    return float(out) if np.ndim(lam) == 0 else out


def spectral_density(profile, g: AdditiveStatistic, lam):
    """``|g^(lam)|^2 (F^(lam) + rho)``."""
    p = _profile(profile)
    gh = np.abs(g.fourier(np.asarray(lam, dtype=float))) ** 2
    out = gh * (p.fhat(lam) + p.rho)
    return float(out) if np.ndim(lam) == 0 else out


def _lambda_breaks(top: float, width: float, singular=(0.5, 1.0)) -> np.ndarray:
    pts = [0.0, top] + [s for s in singular if s < top]
    br = []
    for left, right in zip(pts[:-1], pts[1:]):
        k = max(1, int(math.ceil((right - left) / width)))
        br.extend(np.linspace(left, right, k + 1))
    br = np.array(br)
    # geometric grading towards the logarithmic point of the sine4 transform
    for s in singular:
        if s < top:
            off = np.geomspace(1e-9, 0.25 * width, 30)
            br = np.concatenate([br, s - off, s + off])
    return np.unique(br[(br >= 0) & (br <= top)])


def spectral_variance(profile, g: AdditiveStatistic, *, lam_max: float = 20.0,
                      n: int = 10) -> float:
    """``int |g^|^2 (F^ + rho) dlam``, the variance of ``S_g``.

    Written as ``rho int g^2 + int |g^|^2 F^``; the second integral is cut at
    ``lam_max`` (``F^`` decays like ``lam^-2``), or at the spectral support of
    ``g`` when it has one. ``g`` must be even or real-valued so that the
    integrand is even in ``lam``.
    """
    p = _profile(profile)
    if g.spectral_support is not None:
        top = g.spectral_support
        br = np.unique(np.concatenate([[0.0], top * np.geomspace(1e-9, 1.0, 120)]))
        lam, w = gl_panels(br, n)
        dens = np.abs(g.fourier(lam)) ** 2 * (p.fhat(lam) + p.rho)
        return float(2.0 * np.sum(w * dens))
    lam, w = gl_panels(_lambda_breaks(lam_max, 0.25), n)
    gh2 = np.abs(g.fourier(lam)) ** 2
    return float(p.rho * g.sq_norm() + 2.0 * np.sum(w * gh2 * p.fhat(lam)))


class LinearBoundReport(NamedTuple):
    process: str
    lambda_max: float
    C: float
    passed: bool
    max_ratio: float
    argmax: float
    min_value: float
    violations: tuple


def check_linear_bound(process, lambda_max: float, C: float, *, points: int = 200) -> LinearBoundReport:
    """Check ``0 <= F^(lam) + rho <= C |lam|`` on a grid of ``(0, lambda_max]``.

    ``points = 0`` gives an empty grid and a vacuous pass.
    """
    p = _profile(process)
    if not lambda_max > 0:
        raise ContractError("lambda_max must be positive")
    if points <= 0:
        return LinearBoundReport(p.process, lambda_max, C, True, 0.0, math.nan, 0.0, ())
    lam = lambda_max * np.arange(1, points + 1) / points
    val = p.fhat(lam) + p.rho
    ratio = val / lam
    bad = tuple(float(l) for l, v, r in zip(lam, val, ratio) if v < -1e-12 or r > C)
    k = int(np.argmax(ratio))
    return LinearBoundReport(p.process, float(lambda_max), float(C), not bad,
                             float(ratio[k]), float(lam[k]), float(val.min()), bad)


# Mollifier ------------------------------------------------------------------


def _bump(t):
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1.0
    ts = np.where(inside, t, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - ts * ts)), 0.0)


class Mollifier(NamedTuple):
    statistic: AdditiveStatistic
    n: int
    R: float
    k: int
    C: float
    eps: float


DEFAULT_C = {"sine1": 2.1, "sine4": 1.0}
MAX_N = 10_000


def build_mollifier(n: int, R: float, process="sine1", C: float | None = None) -> Mollifier:
    """Even test function ``phi_n`` with ``phi_n(0) = 1`` and small variance.

    ``phi_n`` is the inverse Fourier transform of

        psi(lam) = chi(k lam) / (C n sqrt(lam^2 + eps^2)),   chi(t) = exp(1 - 1/(1 - t^2)),

    which is smooth, even, supported in ``|lam| < 1/k`` and obeys
    ``psi(lam) <= 1/(C n |lam|)``; ``eps`` is fixed by ``int psi = 1``. The
    scale ``k = max(n, ceil(pi R / arcsin(1/(2n))))`` makes
    ``|exp(2 pi i lam x) - 1| <= 1/n`` on the support for ``|x| <= R``, so
    ``sup_{|x|<=R} |phi_n - 1| <= 1/n``. If ``F^ + rho <= C|lam|`` on the
    support then ``Var S_phi = int psi^2 (F^ + rho) <= 1/n``.
    """
    n = int(n)
    if n < 1:
        raise ContractError("n must be >= 1")
    if n > MAX_N:
        raise ResourceError(f"n = {n} exceeds the quadrature budget ({MAX_N})")
    name = getattr(process, "process", getattr(process, "name", process))
    c = float(DEFAULT_C[name] if C is None else C)
    R = float(R)
    if not R > 0:
        raise ContractError("R must be positive")
    k = max(n, int(math.ceil(math.pi * R / math.asin(1.0 / (2.0 * n)))))
    top = 1.0 / k
    br = np.unique(np.concatenate([[0.0], top * np.geomspace(1e-12, 1.0, 200)]))
    lam, w = gl_panels(br, 12)
    chi = _bump(k * lam)

    def mass(log_eps):
        e = math.exp(log_eps)
        return 2.0 * np.sum(w * chi / (c * n * np.sqrt(lam * lam + e * e))) - 1.0

    lo, hi = math.log(top) - 2.0 * c * n - 10.0, math.log(top) + 5.0
    if mass(lo) < 0:
        raise ResourceError("mollifier normalisation needs eps below the grid resolution")
    eps = math.exp(optimize.brentq(mass, lo, hi, xtol=1e-14))
    if eps < 1e-10 * top:
        raise ResourceError("mollifier normalisation needs eps below the grid resolution")
    psi_w = w * chi / (c * n * np.sqrt(lam * lam + eps * eps))
    norm = 2.0 * psi_w.sum()
    psi_w = psi_w / norm

    def phi(x):
        xa = np.asarray(x, dtype=float)
        out = 2.0 * (np.cos(2.0 * math.pi * np.multiply.outer(xa, lam)) @ psi_w)
        return float(out) if np.ndim(x) == 0 else out

    def spectrum(l):
        la = np.asarray(l, dtype=float)
        return _bump(k * la) / (c * n * np.sqrt(la * la + eps * eps)) / norm

    stat = AdditiveStatistic(phi, None, (), name=f"mollifier(n={n}, R={R:g})",
                             spectrum=spectrum, spectral_support=top)
    return Mollifier(stat, n, R, k, c, eps)


def write_spectral_csv(process: str, lams, fh) -> None:
    """CSV ``process,lambda,fhat_delta_numeric,fhat_delta_closed,abs_err``."""
    p = _profile(process)
    lams = np.asarray(lams, dtype=float)
    f0 = p.fhat(0.0)
    num = p.fhat(lams) - f0
    cf = closed_form_fhat_delta(p.process, lams)
    # both columns are +inf at the sine4 singularity; the error there is nan
    with np.errstate(invalid="ignore"):
        err = np.abs(np.asarray(num) - np.asarray(cf))
    fh.write("process,lambda,fhat_delta_numeric,fhat_delta_closed,abs_err\n")
    for l, a, b, e in zip(lams, num, cf, err):
        fh.write(f"{p.process},{l:.17g},{a:.17g},{b:.17g},{e:.17g}\n")
