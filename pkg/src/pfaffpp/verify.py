"""The acceptance checks, runnable as one report.

Each check returns a :class:`CheckResult`; :func:`format_report` renders one
line per check. Output contains no timings or other run-dependent data, so a
report is byte-identical across runs with the same seed. ``quick=True``
shrinks grids and sample sizes (same tolerances) for a fast smoke run.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

__all__ = ["CheckResult", "CHECKS", "run_check", "run_all", "format_report"]


class CheckResult(NamedTuple):
    number: int
    name: str
    passed: bool
    detail: str


def _g(x) -> str:
    return format(float(x), ".6g")


# 1 -------------------------------------------------------------------------------


def check_pfaffian(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .pfaffian import pfaffian

    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(200):
        m = 2 * (1 + i % 10)
        a = rng.standard_normal((m, m))
        a = a - a.T
        pf, det = pfaffian(a), float(np.linalg.det(a))
        worst = max(worst, abs(pf * pf - det) / max(abs(det), 1e-300))
    a = rng.standard_normal((4, 4))
    a = a - a.T
    closed = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
    err4 = abs(pfaffian(a) - closed)
    ok = worst <= 1e-9 and err4 <= 1e-12
    return ok, f"max rel |Pf^2 - det| = {_g(worst)}, 4x4 closed-form err = {_g(err4)}"


# 2 -------------------------------------------------------------------------------


def check_kernel_structure(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .kernels import matrix_kernel, rho1

    rng = np.random.default_rng(seed + 2)
    npairs = 200 if quick else 1000
    worst_skew = worst_det = worst_diag = 0.0
    for name in ("sine1", "sine4", "bessel1", "bessel4"):
        K = matrix_kernel(name, 1.0 if name.startswith("bessel") else None)
        if K.stationary:
            x, y = rng.uniform(-20, 20, (2, npairs))
        else:
            x, y = rng.uniform(0.01, 40, (2, npairs))
        a, b = K(x, y), K(y, x)
        skew = max(np.max(np.abs(a[:, 0, 1] + b[:, 0, 1])),
                   np.max(np.abs(a[:, 1, 0] + b[:, 1, 0])),
                   np.max(np.abs(a[:, 1, 1] - b[:, 0, 0])))
        worst_skew = max(worst_skew, float(skew))
        worst_det = max(worst_det, float(np.max(np.abs(K.det(x, y) - K.det(y, x)))))
        r = rho1(K, x)
        worst_diag = max(worst_diag, float(np.max(np.abs(r * r - K.det(x, x)))))
    ok = worst_skew <= 1e-9 and worst_det <= 1e-9 and worst_diag <= 1e-8
    return ok, (f"skew err = {_g(worst_skew)}, det symmetry err = {_g(worst_det)}, "
                f"|rho2(x,x)| = {_g(worst_diag)}")


# 3 -------------------------------------------------------------------------------


def check_screening(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .kernels import matrix_kernel
    from .rigidity import screening_integral

    v1 = screening_integral(matrix_kernel("sine1"), 0.0, 100.0)
    v4 = screening_integral(matrix_kernel("sine4"), 0.0, 200.0)
    ok = abs(v1 + 1.0) <= 0.05 and abs(v4 + 0.5) <= 0.05
    return ok, f"sine1 M=100: {_g(v1)}, sine4 M=200: {_g(v4)}"


# 4 -------------------------------------------------------------------------------


def check_bessel_residuals(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .kernels import matrix_kernel
    from .rigidity import screening_average, screening_residual, screening_residual_closed_form

    xs = (0.5, 2.0) if quick else (0.5, 1.0, 2.0, 5.0, 10.0)
    Xs = (1e2, 1e3) if quick else (1e2, 1e3, 1e4)
    parts, ok = [], True
    for name in ("bessel4", "bessel1"):
        K = matrix_kernel(name, 1.0)
        worst = 0.0
        for x in xs:
            q = screening_residual(K, x).value
            c = screening_residual_closed_form(K, x)
            worst = max(worst, abs(c - q) / max(abs(q), abs(c), 1e-300))
        avg = [r.value for r in screening_average(K, list(Xs))]
        dec = all(abs(b) < abs(a) for a, b in zip(avg[:-1], avg[1:]))
        small = abs(avg[-1]) <= 0.02
        ok = ok and worst <= 1e-3 and dec and small
        parts.append(f"{name}: closed-form rel err {_g(worst)}, averaged "
                     + "/".join(_g(v) for v in avg) + f" (decreasing={dec})")
    return ok, "; ".join(parts)


# 5 -------------------------------------------------------------------------------


def check_defects(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .kernels import matrix_kernel
    from .rigidity import defect, defect_closed_form

    d1 = defect(matrix_kernel("sine1"), 0.0).value
    d4 = defect(matrix_kernel("sine4"), 0.0).value
    ok = abs(d1) <= 1e-6 and abs(d4) <= 1e-6
    parts = [f"sine defects {_g(d1)}, {_g(d4)}"]
    xs = (0.5, 2.0) if quick else (0.5, 1.0, 2.0, 5.0, 10.0)
    for name in ("bessel4", "bessel1"):
        K = matrix_kernel(name, 1.0)
        worst = 0.0
        for x in xs:
            q = defect(K, x).value
            c = defect_closed_form(K, x)
            worst = max(worst, abs(c - q) / max(abs(q), 1e-300))
        ok = ok and worst <= 1e-3
        parts.append(f"{name} closed-form rel err {_g(worst)}")
    return ok, "; ".join(parts)


# 6 -------------------------------------------------------------------------------


def check_spectral_closed_forms(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .spectral import closed_form_fhat_delta, stationary_profile

    lam = np.round(np.arange(1, 21) * 0.1, 12)
    ok, parts = True, []
    for name in ("sine1", "sine4"):
        p = stationary_profile(name)
        f0 = p.fhat(0.0)
        use = lam if name == "sine1" else lam[np.abs(lam - 0.5) >= 0.05]
        err = float(np.max(np.abs(p.fhat(use) - f0 - closed_form_fhat_delta(name, use))))
        e0 = abs(f0 + p.rho)
        ok = ok and err <= 5e-3 and e0 <= 2e-2
        parts.append(f"{name}: max err {_g(err)}, |F^(0) + rho| = {_g(e0)}")
    left = 2.0 - math.log1p(2.0)
    right = 2.0 - math.log(3.0 / 1.0)
    cont = abs(left - right)
    ok = ok and cont <= 1e-12
    parts.append(f"sine1 branch jump at 1 = {_g(cont)}")
    return ok, "; ".join(parts)


# 7 -------------------------------------------------------------------------------


def check_linear_bound_criterion(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .spectral import check_linear_bound

    r1 = check_linear_bound("sine1", 1.0, 2.1)
    r4 = check_linear_bound("sine4", 0.4, 1.0)
    return r1.passed and r4.passed, (f"sine1 max ratio {_g(r1.max_ratio)} (C=2.1), "
                                     f"sine4 max ratio {_g(r4.max_ratio)} (C=1)")


# 8 -------------------------------------------------------------------------------


def check_mollifier(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .spectral import build_mollifier, spectral_variance

    R = 2.0
    x = np.linspace(-R, R, 401)
    ok, parts = True, []
    for name in ("sine1", "sine4"):
        for n in (1, 2, 5):
            m = build_mollifier(n, R, name)
            var = spectral_variance(name, m.statistic)
            dev = float(np.max(np.abs(m.statistic(x) - 1.0)))
            ok = ok and var <= 1.0 / n and dev <= 1.0 / n
            parts.append(f"{name} n={n}: var {_g(var)}, sup dev {_g(dev)}")
    return ok, "; ".join(parts)


# 9 -------------------------------------------------------------------------------


def check_variance_sweeps(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .kernels import matrix_kernel
    from .rigidity import variance_sweep

    ok, parts = True, []
    for name in ("sine1", "sine4", "bessel1", "bessel4"):
        K = matrix_kernel(name, 1.0 if name.startswith("bessel") else None)
        ts = (10.0, 100.0) if quick and not K.stationary else (10.0, 100.0, 1000.0)
        v = [r.variance for r in variance_sweep(K, 1.0, ts)]
        dec = all(b < a for a, b in zip(v[:-1], v[1:]))
        ratio = v[-1] / v[0]
        ok = ok and dec and ratio <= 0.5
        parts.append(f"{name}: " + "/".join(_g(a) for a in v) + f" ratio {_g(ratio)}")
    return ok, "; ".join(parts)


# 10 ------------------------------------------------------------------------------


def check_occupation(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .occupation import cov_abs_tail, cov_total_sum, covariance_series, divergence_probe_sine4_lambda1

    ok, parts = True, []
    for name, lam in (("sine1", 1.0), ("sine4", 2.0)):
        ser = covariance_series(name, lam, n_max=512)
        tot = cov_total_sum(ser, 200).value
        scaled = [cov_abs_tail(ser, N).scaled for N in range(10, 101, 10)]
        bounded = max(scaled) <= 2.0 * min(scaled)
        ok = ok and abs(tot) <= 0.02 and bounded
        parts.append(f"{name} lam={_g(lam)}: total {_g(tot)}, N*tail in "
                     f"[{_g(min(scaled))}, {_g(max(scaled))}]")
    g1 = [s for _, s in divergence_probe_sine4_lambda1([100, 400], 1.0)]
    g2 = [s for _, s in divergence_probe_sine4_lambda1([100, 400], 2.0)]
    gain1, gain2 = g1[1] - g1[0], g2[1] - g2[0]
    ok = ok and gain1 >= 1e-3 and gain2 <= 1e-4
    parts.append(f"sine4 gain N=100..400: lam=1 {_g(gain1)}, lam=2 {_g(gain2)}")
    return ok, "; ".join(parts)


# 11 ------------------------------------------------------------------------------


def check_monte_carlo(quick: bool = False, seed: int = 0) -> tuple[bool, str]:
    from .ensembles import validate_bessel4_hard_edge, validate_sine1_bulk

    a = validate_sine1_bulk(2000 if quick else 10_000, 200, seed)
    b = validate_bessel4_hard_edge(1.0, 10_000 if quick else 40_000, 100, seed)
    return a.passed and b.passed, (
        f"sine1 bulk variance {_g(a.observed)} vs {_g(a.target)} (tol {_g(a.tolerance)}); "
        f"bessel4 hard-edge mean {_g(b.observed)} vs {_g(b.target)} (tol {_g(b.tolerance)})")


CHECKS: dict[int, tuple[str, Callable]] = {
    1: ("pfaffian", check_pfaffian),
    2: ("kernel structure", check_kernel_structure),
    3: ("screening identities", check_screening),
    4: ("bessel residuals", check_bessel_residuals),
    5: ("defects", check_defects),
    6: ("spectral closed forms", check_spectral_closed_forms),
    7: ("linear spectral bound", check_linear_bound_criterion),
    8: ("mollifier", check_mollifier),
    9: ("variance sweeps", check_variance_sweeps),
    10: ("occupation numbers", check_occupation),
    11: ("monte carlo", check_monte_carlo),
}


def run_check(number: int, quick: bool = False, seed: int = 0) -> CheckResult:
    name, fn = CHECKS[number]
    passed, detail = fn(quick=quick, seed=seed)
    return CheckResult(number, name, bool(passed), detail)


def run_all(quick: bool = False, seed: int = 0, only=None) -> list[CheckResult]:
    nums = sorted(CHECKS) if only is None else sorted(only)
    return [run_check(k, quick, seed) for k in nums]


def format_report(results) -> str:
    lines = [f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.name}: {r.detail}" for r in results]
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
