import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from pfaffpp.errors import ContractError, DivergenceError, QuadratureError
from pfaffpp.quad import (BesselEnvelope, IntegralSpec, PanelRule, Periodic, gl_panels,
                          integrate, integrate_oscillatory_tail, iterated_aitken)

# dense trapezoid (10^6 panels) of S(x)^2 on [0, 10]; agrees with a 30-digit run to 1e-16
SINC_SQ_0_10 = 0.4949364995706956
# pi/2 - Si(1) with Si(1) from its power series
SI_TAIL_1 = 0.62471325642771360429


def test_constant():
    r = integrate(lambda x: np.ones_like(x), 0.0, 1.0)
    assert r.value == pytest.approx(1.0, abs=1e-15)


def test_sinc_squared():
    r = integrate(lambda x: np.sinc(x) ** 2, 0.0, 10.0, rel_tol=1e-12)
    assert r.value == pytest.approx(SINC_SQ_0_10, abs=1e-11)


def test_endpoint_singularity():
    r = integrate(lambda x: x ** -0.5, 0.0, 1.0, rel_tol=1e-10)
    assert r.value == pytest.approx(2.0, abs=1e-8)


def test_reversed_and_empty():
    f = np.exp
    assert integrate(f, 1.0, 0.0).value == pytest.approx(-(math.e - 1), rel=1e-12)
    assert integrate(f, 2.0, 2.0).value == 0.0


def test_nonconvergence_carries_partial_value():
    with pytest.raises(QuadratureError) as exc:
        integrate(lambda x: np.sin(1.0 / x) / x, 1e-8, 1.0, max_intervals=30)
    assert np.isfinite(exc.value.value)


def test_bad_tolerances():
    with pytest.raises(ContractError):
        integrate(np.exp, 0, 1, rel_tol=0.0)
    with pytest.raises(ContractError):
        IntegralSpec(np.exp, 1.0, 0.0)


def test_j0_half_line():
    r = integrate_oscillatory_tail(lambda t: special.j0(t), 0.0, BesselEnvelope(0.0), rel_tol=1e-10)
    assert r.value == pytest.approx(1.0, abs=1e-9)


def test_sine_integral_tail():
    r = integrate_oscillatory_tail(lambda u: np.sin(u) / u, 1.0, Periodic(2 * math.pi), rel_tol=1e-11)
    assert r.value == pytest.approx(SI_TAIL_1, abs=1e-9)


def test_zero_envelope():
    r = integrate_oscillatory_tail(lambda u: 0.0 * u, 0.0, Periodic(1.0))
    assert r.value == 0.0


def test_growing_envelope_diverges():
    with pytest.raises(DivergenceError):
        integrate_oscillatory_tail(lambda u: u * np.sin(u), 0.0, Periodic(2 * math.pi))


def test_spec_dispatch():
    fin = IntegralSpec(lambda x: x * x, 0.0, 3.0).evaluate()
    assert fin.value == pytest.approx(9.0, rel=1e-13)
    tail = IntegralSpec(lambda u: np.sin(u) / u, 1.0, oscillation=Periodic(2 * math.pi),
                        rel_tol=1e-11).evaluate()
    assert tail.value == pytest.approx(SI_TAIL_1, abs=1e-9)
    with pytest.raises(ContractError):
        IntegralSpec(np.exp, 0.0).evaluate()


def test_lobe_acceleration_matches_brute_sum():
    # J0(t) J1(t) / t on [1, inf): accelerated value vs 10^4 brute-force lobes
    f = lambda t: special.j0(t) * special.j1(t) / t
    acc = integrate_oscillatory_tail(f, 1.0, Periodic(math.pi), rel_tol=1e-10).value
    zeros = 1.0 + np.arange(0, 10001) * (math.pi / 2)
    x, w = gl_panels(zeros, 20)
    brute = float(np.sum(w * f(x)))
    # integrand ~ -cos(2t)/(pi t^2): the tail beyond t ~ 1.6e4 is O(1e-9)
    assert acc == pytest.approx(brute, abs=1e-6)


def test_aitken_on_alternating_series():
    k = np.arange(1, 30)
    s = np.cumsum((-1.0) ** (k + 1) / k)
    assert iterated_aitken(s)[-1] == pytest.approx(math.log(2), abs=1e-10)


def test_panel_rule_cumulative():
    rule = PanelRule(np.linspace(0, 3, 7), 12)
    vals = np.cos(rule.nodes)
    np.testing.assert_allclose(rule.cumulative(vals), np.sin(rule.nodes), atol=1e-14)
    np.testing.assert_allclose(rule.cumulative_at_breaks(vals), np.sin(rule.breaks), atol=1e-14)
    assert rule.integrate(vals) == pytest.approx(math.sin(3.0), abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.01, 3), st.floats(0.01, 3))
def test_additivity(a, d1, d2):
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    b, c = a + d1, a + d1 + d2
    whole = integrate(f, a, c, rel_tol=1e-12)
    parts = integrate(f, a, b, rel_tol=1e-12).value + integrate(f, b, c, rel_tol=1e-12).value
    assert whole.value == pytest.approx(parts, abs=1e-11)
