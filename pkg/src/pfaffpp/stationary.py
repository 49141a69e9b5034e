"""Truncated pair correlation of the stationary (sine) Pfaffian processes.

For the sine kernels ``rho^(2,T)(x, y) = F(x - y)`` with

    sine1:  F(u) = -S(u)^2 + S'(u) (IS(u) - sgn(u)/2)
    sine4:  F(u) = (-S(u)^2 + S'(u) IS(u)) / 4 = S'(u)/8 + F1(u)/4   (u > 0)

``F1(u) = -1/(pi u)^2 + O(u^-4)`` and ``S'(u) = cos(pi u)/u + O(u^-2)``, which
gives the two tail models. Integrals of ``F`` over half-lines and its cosine
transform are split into a numerical part on ``[0, X]`` and a tail that is
either exact (the ``S'`` piece, through sine/cosine integrals) or carries an
``O(X^-3)`` remainder (the inverse-square piece).
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy import special

from .errors import ContractError
from .quad import Periodic, PanelRule, integrate_oscillatory_tail
from .specfun import sine_kernel_parts

__all__ = ["StationaryProfile", "stationary_profile"]

TAIL_MODELS = {"sine1": "inverse-square", "sine4": "cosine-over-x plus inverse-square"}

# Truncation of the cosine transform; beyond X the tail is analytic.
FHAT_CUTOFF = 1.0e4


def _f1(u):
    s, ds, isx, eps = sine_kernel_parts(u)
    return -s * s + ds * (isx - eps)


def _f4(u):
    s, ds, isx, _ = sine_kernel_parts(u)
    return 0.25 * (-s * s + ds * isx)


def _ci_abs(z):
    return special.sici(np.abs(z))[1]


def _inverse_square_cos_tail(a: float, x: float) -> float:
    # 2 int_X^inf cos(a u) (-1/(pi u)^2) du
    if a == 0.0:
        return -2.0 / (math.pi**2 * x)
    si, _ = special.sici(a * x)
    return -2.0 / math.pi**2 * (math.cos(a * x) / x - a * (0.5 * math.pi - si))


def _dsinc_cos_tail(a: float, x: float) -> float:
    # int_X^inf S'(u) cos(a u) du, exact:
    # = -S(X) cos(aX) + a int_X^inf S(u) sin(a u) du
    base = -np.sinc(x) * math.cos(a * x)
    if a == 0.0:
        return float(base)
    lo = abs(math.pi - a) * x
    if lo == 0.0:
        return math.inf
    ci_hi = special.sici((math.pi + a) * x)[1]
    ci_lo = special.sici(lo)[1]
    return float(base + a / (2.0 * math.pi) * (ci_hi - ci_lo))


class StationaryProfile:
    """``rho`` and ``F`` for ``sine1`` or ``sine4``.

    Parameters
    ----------
    process : {"sine1", "sine4"}
    """

    def __init__(self, process: str):
        if process not in TAIL_MODELS:
            raise ContractError(f"no stationary profile for {process!r}")
        self.process = process
        self.rho = 1.0 if process == "sine1" else 0.5
        self.tail_model = TAIL_MODELS[process]
        self._f = _f1 if process == "sine1" else _f4

    def __repr__(self):
        return f"StationaryProfile({self.process!r}, rho={self.rho})"

    def F(self, u):
        """Truncated pair correlation ``rho^(2,T)(u, 0)``; even in ``u``."""
        ua = np.abs(np.asarray(u, dtype=float))
        out = self._f(ua)
        return float(out) if np.ndim(u) == 0 else out

    def envelope_constant(self, lo: float = 50.0, hi: float = 500.0) -> float:
        """Fitted ``C`` in the tail bound, ``max x^2 |F(x) - lead(x)|`` on ``[lo, hi]``.

        ``lead`` is 0 for sine1 and ``cos(pi x)/(8x)`` for sine4.
        """
        x = np.linspace(lo, hi, int(64 * (hi - lo)) + 1)
        r = self.F(x)
        if self.process == "sine4":
            r = r - np.cos(math.pi * x) / (8.0 * x)
        return float(np.max(np.abs(r) * x * x))

    def tail_integral(self, v: float) -> float:
        """``int_v^inf F(u) du`` for ``v >= 1``."""
        v = float(v)
        if v < 1.0:
            raise ContractError("tail_integral needs v >= 1")
        rem = integrate_oscillatory_tail(
            lambda u: _f1(u) + 1.0 / (math.pi * u) ** 2, v, Periodic(1.0),
            abs_tol=1e-15, rel_tol=1e-10).value
        t1 = -1.0 / (math.pi**2 * v) + rem
        if self.process == "sine1":
            return t1
        return -float(np.sinc(v)) / 8.0 + 0.25 * t1

    def G(self, u, cutoff: float | None = None) -> np.ndarray:
        """``G(u) = int_u^inf F`` at sorted non-negative ``u`` (vectorised)."""
        ua = np.atleast_1d(np.asarray(u, dtype=float))
        top = max(8.0, float(ua.max()) + 1.0) if cutoff is None else cutoff
        rule = PanelRule(np.linspace(0.0, top, int(math.ceil(top / 0.5)) + 1), 16)
        cum = rule.cumulative_at_breaks(self.F(rule.nodes))
        total = cum[-1]
        # running integral at arbitrary u: panel start value + local GL piece
        out = np.empty_like(ua)
        for i, x in enumerate(ua):
            k = min(int(np.searchsorted(rule.breaks, x, side="right")) - 1, rule.npanel - 1)
            a = rule.breaks[k]
            t, w = np.polynomial.legendre.leggauss(16)
            h = 0.5 * (x - a)
            part = h * (self.F(a + h * (t + 1.0)) @ w) if h > 0 else 0.0
            out[i] = total - (cum[k] + part)
        out += self.tail_integral(top)
        return out if np.ndim(u) else float(out[0])

    # cosine transform -------------------------------------------------

    @cached_property
    def _fhat_rule(self):
        x = FHAT_CUTOFF
        rule = PanelRule(np.linspace(0.0, x, int(x / 0.25) + 1), 10)
        fw = self.F(rule.nodes) * rule.weights
        return rule.nodes, fw

    def fhat(self, lam) -> np.ndarray | float:
        """``F^(lam) = int F(u) exp(-2 pi i lam u) du`` (real, even)."""
        la = np.abs(np.atleast_1d(np.asarray(lam, dtype=float)))
        nodes, fw = self._fhat_rule
        x = FHAT_CUTOFF
        out = np.empty_like(la)
        for i, l in enumerate(la):
            a = 2.0 * math.pi * l
            body = 2.0 * (np.cos(a * nodes) @ fw)
            t1 = _inverse_square_cos_tail(a, x)
            if self.process == "sine1":
                tail = t1
            else:
                tail = 0.25 * _dsinc_cos_tail(a, x) + 0.25 * t1
            out[i] = body + tail
        return out if np.ndim(lam) else float(out[0])


_PROFILES: dict[str, StationaryProfile] = {}


def stationary_profile(process) -> StationaryProfile:
    """Shared profile instance for ``"sine1"``/``"sine4"`` or a sine MatrixKernel."""
    name = getattr(process, "name", process)
    if name not in _PROFILES:
        _PROFILES[name] = StationaryProfile(name)
    return _PROFILES[name]
