import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from pfaffpp.errors import ContractError, DomainError
from pfaffpp.kernels import (bessel1_scalar, bessel2, bessel4_scalar, correlation, correlation_matrix,
                             matrix_kernel, rho1, rho2_truncated, scalar_kernel)
from pfaffpp.pfaffian import pfaffian
from pfaffpp.quad import PanelRule

from _oracles import pfaffian_by_matchings

ALL = [("sine1", None), ("sine4", None), ("bessel1", 1.0), ("bessel4", 1.0)]


def _b2_direct(a, x, y):
    rx, ry = math.sqrt(x), math.sqrt(y)
    return (rx * special.jv(a + 1, rx) * special.jv(a, ry)
            - ry * special.jv(a + 1, ry) * special.jv(a, rx)) / (2 * (x - y))


def _points(name, rng, n):
    if name.startswith("sine"):
        return rng.uniform(-15, 15, n)
    return rng.uniform(0.05, 60, n)


# scalar kernels -----------------------------------------------------------------


def test_bessel2_symmetric():
    assert bessel2(1.3, 0.7, 5.2) == pytest.approx(bessel2(1.3, 5.2, 0.7), rel=1e-14)


def test_bessel2_diagonal_limit():
    h = 1e-4
    dq = 0.5 * (_b2_direct(1.0, 1.0, 1.0 + h) + _b2_direct(1.0, 1.0, 1.0 - h))
    assert bessel2(1.0, 1.0, 1.0) == pytest.approx(dq, abs=1e-9)


def test_bessel2_near_diagonal_continuous():
    x = 3.0
    for d in (1e-9, 1e-7, 1e-5, 1e-3):
        mid = 0.5 * (bessel2(0.5, x, x + d) + bessel2(0.5, x, x - d))
        assert mid == pytest.approx(bessel2(0.5, x, x), abs=1e-10 + d * d)


def test_bessel2_projection():
    # int_0^inf k(x,t) k(t,y) dt in t = u^2; P(U) extrapolated in 1/U
    a, x, y = 1.0, 1.0, 2.0
    U = 4000.0
    rule = PanelRule(np.linspace(0, U, int(U / 0.5) + 1), 16)
    u = rule.nodes
    cum = rule.cumulative_at_breaks(2 * u * bessel2(a, x, u * u) * bessel2(a, u * u, y))
    b = rule.breaks
    sel = b > U / 2
    basis = np.vstack([np.ones(sel.sum()), 1 / b[sel], 1 / b[sel] ** 2,
                       np.cos(2 * b[sel]) / b[sel] ** 2, np.sin(2 * b[sel]) / b[sel] ** 2]).T
    limit = np.linalg.lstsq(basis, cum[sel], rcond=None)[0][0]
    assert limit == pytest.approx(bessel2(a, x, y), abs=1e-4)


def test_bessel2_domain():
    with pytest.raises(DomainError):
        bessel2(1.0, -1.0, 2.0)
    with pytest.raises(DomainError):
        bessel2(1.0, 0.0, 2.0)


def test_bessel4_vanishes_at_origin():
    assert abs(bessel4_scalar(1.0, 1e-12, 2.0)) < 1e-10


def test_bessel4_far_limit():
    x, s = 2.0, 1.0
    lim = -special.jv(2 * s - 1, 2 * math.sqrt(x)) / (4 * math.sqrt(x))
    assert bessel4_scalar(s, 1e6, x) == pytest.approx(lim, abs=1e-2)


def test_bessel4_two_constructions_agree():
    s, x, y = 1.0, 0.7, 1.9
    lhs = 2 * bessel2(2 * s, 4 * x, 4 * y) - 2 * math.sqrt(x / y) * bessel2(2 * s - 1, 4 * x, 4 * y)
    rhs = -special.jv(2 * s, 2 * math.sqrt(x)) * special.jv(2 * s - 1, 2 * math.sqrt(y)) / (2 * math.sqrt(y))
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_bessel1_at_origin():
    x, s = 2.0, 1.0
    expected = special.jv(s + 1, math.sqrt(x)) / (4 * math.sqrt(x))
    assert bessel1_scalar(s, 1e-12, x) == pytest.approx(expected, rel=1e-9)


def test_bessel1_far_limit():
    assert abs(bessel1_scalar(1.0, 1e6, 2.0)) < 1e-2


def test_bessel1_componentwise_quadrature():
    s, x, y = 1.0, 1.0, 4.0
    head, _ = integrate.quad(lambda t: special.jv(s + 1, t), 0, math.sqrt(x), epsabs=1e-14)
    expected = (math.sqrt(x / y) * _b2_direct(s + 1, x, y)
                + special.jv(s + 1, math.sqrt(y)) / (4 * math.sqrt(y)) * (1 - head))
    assert bessel1_scalar(s, x, y) == pytest.approx(expected, rel=1e-10)


def test_scalar_kernel_objects():
    k = scalar_kernel("bessel2", 1.0)
    assert k(1.0, 2.0) == pytest.approx(bessel2(1.0, 1.0, 2.0))
    assert scalar_kernel("sine2")(0.0, 0.0) == 1.0
    with pytest.raises(ContractError):
        scalar_kernel("airy")


# matrix kernels ----------------------------------------------------------------


def test_sine_identity_on_diagonal():
    np.testing.assert_array_equal(np.abs(matrix_kernel("sine1")(0.0, 0.0)), np.eye(2))
    np.testing.assert_allclose(matrix_kernel("sine4")(1.3, 1.3), 0.5 * np.eye(2), atol=0)


def test_bessel4_integral_entry_by_quadrature():
    K = matrix_kernel("bessel4", 1.0)
    ref, _ = integrate.quad(lambda t: bessel4_scalar(1.0, 3.0, t), 1.0, 3.0, epsabs=1e-14)
    assert K.k12(3.0, 1.0) == pytest.approx(ref, rel=1e-9)


def test_bessel1_integral_entry_by_quadrature():
    K = matrix_kernel("bessel1", 1.0)
    ref, _ = integrate.quad(lambda t: bessel1_scalar(1.0, 2.5, t), 0.8, 2.5, epsabs=1e-14)
    assert K.k12(2.5, 0.8) == pytest.approx(ref - 0.5, rel=1e-9)


def test_derivative_entry_finite_difference():
    for name, s in ALL[2:]:
        K = matrix_kernel(name, s)
        h = 1e-5
        fd = (K.k11(2.0 + h, 5.0) - K.k11(2.0 - h, 5.0)) / (2 * h)
        assert K.k21(2.0, 5.0) == pytest.approx(fd, abs=1e-8)


def test_unknown_and_missing_parameter():
    with pytest.raises(ContractError):
        matrix_kernel("airy")
    with pytest.raises(ContractError):
        matrix_kernel("bessel4")


def test_bessel_domain():
    K = matrix_kernel("bessel4", 1.0)
    with pytest.raises(DomainError):
        K(-1.0, 2.0)
    with pytest.raises(DomainError):
        rho1(K, 0.0)


def test_rho1_values():
    assert rho1(matrix_kernel("sine1"), 0.3) == 1.0
    assert rho1(matrix_kernel("sine4"), -7.0) == 0.5
    K = matrix_kernel("bessel4", 1.0)
    h = 1e-4
    dq = 0.5 * (bessel4_scalar(1.0, 2.0, 2.0 + h) + bessel4_scalar(1.0, 2.0, 2.0 - h))
    assert rho1(K, 2.0) == pytest.approx(dq, abs=1e-8)


def test_rho2_truncated_values():
    assert rho2_truncated(matrix_kernel("sine1"), 0.4, 0.4) == pytest.approx(-1.0, abs=1e-15)
    assert rho2_truncated(matrix_kernel("sine4"), 0.4, 0.4) == pytest.approx(-0.25, abs=1e-15)
    v = rho2_truncated(matrix_kernel("sine4"), 0.0, 20.0)
    assert abs(v - math.cos(20 * math.pi) / (8 * 20)) <= 1.0 / 20 ** 2


def test_correlation_low_orders():
    for name, s in ALL:
        K = matrix_kernel(name, s)
        x, y = (0.4, 1.7) if s is None else (2.0, 7.5)
        assert correlation(K, [x]).value == pytest.approx(rho1(K, x), rel=1e-12)
        two = rho1(K, x) * rho1(K, y) - K.det(x, y)
        assert correlation(K, [x, y]).value == pytest.approx(two, rel=1e-10, abs=1e-14)


def test_correlation_three_points_by_matchings():
    K = matrix_kernel("sine1")
    pts = [0.0, 0.3, 0.9]
    m = correlation_matrix(K, pts)
    assert correlation(K, pts).value == pytest.approx(pfaffian_by_matchings(m), rel=1e-11)


def test_correlation_coincident_points():
    r = correlation(matrix_kernel("sine1"), [0.2, 0.2, 1.0])
    assert r.value == 0.0 and r.degenerate


def test_sine_stationarity():
    K = matrix_kernel("sine1")
    d = np.linspace(-4, 4, 33)
    for shift in (-3.0, 0.5, 11.0):
        np.testing.assert_allclose(K(d + shift, shift), K(d, 0.0), atol=1e-14)


# invariants --------------------------------------------------------------------


@pytest.mark.parametrize("name,s", ALL)
def test_skew_and_det_symmetry(name, s):
    K = matrix_kernel(name, s)
    rng = np.random.default_rng(7)
    x, y = _points(name, rng, 1000), _points(name, rng, 1000)
    a, b = K(x, y), K(y, x)
    np.testing.assert_allclose(a[:, 1, 1], b[:, 0, 0], atol=1e-9)
    np.testing.assert_allclose(a[:, 0, 1], -b[:, 0, 1], atol=1e-9)
    np.testing.assert_allclose(a[:, 1, 0], -b[:, 1, 0], atol=1e-9)
    np.testing.assert_allclose(K.det(x, y), K.det(y, x), atol=1e-9)


@pytest.mark.parametrize("name,s", ALL)
def test_rho2_vanishes_on_diagonal(name, s):
    K = matrix_kernel(name, s)
    x = _points(name, np.random.default_rng(8), 200)
    np.testing.assert_allclose(rho1(K, x) ** 2 - K.det(x, x), 0.0, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALL), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_correlations_nonnegative(kernel, k, seed):
    name, s = kernel
    K = matrix_kernel(name, s)
    rng = np.random.default_rng(seed)
    pts = _points(name, rng, k)
    if k > 1 and np.min(np.diff(np.sort(pts))) < 1e-6:
        return
    assert correlation(K, pts).value >= -1e-8


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ALL), st.integers(0, 2**32 - 1))
def test_pfaffian_matrix_matches_direct(kernel, seed):
    name, s = kernel
    K = matrix_kernel(name, s)
    pts = _points(name, np.random.default_rng(seed), 3)
    m = correlation_matrix(K, pts)
    assert pfaffian(m) == pytest.approx(pfaffian_by_matchings(m), rel=1e-9, abs=1e-14)
