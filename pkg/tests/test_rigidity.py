import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfaffpp.errors import ContractError, DomainError
from pfaffpp.kernels import matrix_kernel
from pfaffpp.occupation import occupation_cov
from pfaffpp.quad import PanelRule
from pfaffpp.rigidity import (AdditiveStatistic, TaperFunction, defect, defect_closed_form, indicator,
                              screening_average, screening_integral, screening_residual,
                              screening_residual_closed_form, taper_eval, variance_additive,
                              variance_sweep, write_sweep_csv)

SINE1 = matrix_kernel("sine1")
SINE4 = matrix_kernel("sine4")
BESSEL4 = matrix_kernel("bessel4", 1.0)
BESSEL1 = matrix_kernel("bessel1", 1.0)

# Var of the unit-interval count for sine1 (tent integral of F, 30-digit check)
SINE1_UNIT_VAR = 0.44633362426
# bessel4(s=1), one-sided phi^(1,100): dense x-grid double integral of det K
BESSEL4_TAPER_100 = 0.0346588984


# taper -------------------------------------------------------------------------


def test_taper_values():
    t = TaperFunction(1.0, 100.0)
    assert taper_eval(t, 1.0) == 1.0
    assert taper_eval(t, 0.0) == 1.0
    assert taper_eval(t, 100.0) == 0.0
    assert taper_eval(t, 250.0) == 0.0
    # log(x - R + 1) is half of log(T - R + 1) at x = 10
    assert taper_eval(t, 10.0) == pytest.approx(0.5, abs=1e-15)


def test_taper_errors():
    with pytest.raises(ContractError):
        TaperFunction(2.0, 2.0)
    with pytest.raises(ContractError):
        TaperFunction(2.0, 1.0)
    with pytest.raises(DomainError):
        taper_eval(TaperFunction(1.0, 5.0), -0.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.01, 1e4), st.lists(st.floats(0, 2e4), min_size=2, max_size=20))
def test_taper_monotone_in_unit_interval(R, gap, xs):
    t = TaperFunction(R, R + gap)
    xs = np.sort(np.array(xs))
    v = t(xs)
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) <= 1e-15)


def test_taper_continuity():
    t = TaperFunction(2.0, 50.0)
    for p in (2.0, 50.0):
        assert abs(t(p - 1e-9) - t(p + 1e-9)) < 1e-9


def test_derivative_autocorrelation_numeric():
    # B(u) = int f'(x) f'(x+u) dx, compared with direct quadrature
    t = TaperFunction(1.0, 20.0)

    def fp(x):
        xa = np.abs(x)
        inside = (xa > t.R) & (xa < t.T)
        return np.where(inside, -np.sign(x) / ((np.maximum(xa, t.R) - t.R + 1.0) * t.log_span), 0.0)

    breaks = np.unique(np.concatenate([np.linspace(-20, 20, 801), [-1, 1]]))
    for u in (0.0, 0.7, 3.0, 12.5, 30.0):
        shifted = np.unique(np.concatenate([breaks, breaks - u]))
        rule = PanelRule(shifted, 16)
        direct = rule.integrate(fp(rule.nodes) * fp(rule.nodes + u))
        assert t.derivative_autocorrelation(u, True) == pytest.approx(direct, abs=1e-10)


# variance ---------------------------------------------------------------------------


def test_zero_function():
    zero = AdditiveStatistic(lambda x: 0.0 * np.asarray(x), (0.5, 3.0))
    assert variance_additive(SINE1, zero).value == 0.0
    assert variance_additive(BESSEL4, zero).value == 0.0


def test_indicator_matches_occupation():
    v = variance_additive(SINE1, indicator(-0.5, 0.5)).value
    assert v == pytest.approx(occupation_cov(SINE1, 1.0, 0), abs=1e-4)
    assert v == pytest.approx(SINE1_UNIT_VAR, abs=1e-9)


@pytest.mark.parametrize("kernel", [SINE1, SINE4])
def test_screened_form_equals_general(kernel):
    for f in (indicator(-1.0, 2.5), TaperFunction(1.0, 30.0).statistic(True)):
        g = variance_additive(kernel, f).value
        s = variance_additive(kernel, f, form="screened").value
        assert g == pytest.approx(s, abs=1e-6)


def test_screened_form_only_for_sine():
    with pytest.raises(ContractError):
        variance_additive(BESSEL4, indicator(1, 2), form="screened")


def test_bessel4_taper_golden():
    f = TaperFunction(1.0, 100.0).statistic()
    r = variance_additive(BESSEL4, f)
    assert r.value > 0
    assert r.value == pytest.approx(BESSEL4_TAPER_100, abs=1e-6)
    assert r.err_estimate < 1e-6


def test_bessel_variance_ignores_negative_half_line():
    base = indicator(0.5, 4.0)
    extra = AdditiveStatistic(lambda x: base(x) + 3.0 * ((np.asarray(x) > -5) & (np.asarray(x) < -1)),
                              (-5.0, 4.0), (-1.0, 0.5))
    for K in (BESSEL4, BESSEL1):
        assert variance_additive(K, extra).value == pytest.approx(variance_additive(K, base).value,
                                                                   abs=1e-10)


def test_noncompact_rejected():
    spec = AdditiveStatistic(lambda x: np.exp(-np.asarray(x) ** 2), None,
                             spectrum=lambda l: np.sqrt(np.pi) * np.exp(-(np.pi * l) ** 2))
    with pytest.raises(ContractError):
        variance_additive(SINE1, spec)


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(["sine1", "sine4", "bessel1", "bessel4"]), st.floats(0.05, 20.0),
       st.floats(0.05, 8.0), st.floats(-2.0, 2.0))
def test_variance_nonnegative(name, a, width, height):
    K = matrix_kernel(name, 1.0 if name.startswith("bessel") else None)
    f = AdditiveStatistic(lambda x: height * ((np.asarray(x) >= a) & (np.asarray(x) < a + width))
                          + np.where((np.asarray(x) >= a) & (np.asarray(x) < a + width),
                                     np.cos(np.asarray(x)), 0.0),
                          (a, a + width))
    assert variance_additive(K, f).value >= -1e-6


# defects and screening ------------------------------------------------------------


def test_sine_defects_vanish():
    assert abs(defect(SINE1, 0.0).value) <= 1e-6
    assert abs(defect(SINE4, 3.0).value) <= 1e-6
    assert defect_closed_form(SINE1, 0.0) == 0.0


@pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("kernel", [BESSEL4, BESSEL1], ids=["bessel4", "bessel1"])
def test_bessel_defect_matches_derived_closed_form(kernel, x):
    q = defect(kernel, x)
    assert q.error < 1e-7
    assert q.value == pytest.approx(defect_closed_form(kernel, x, corrected=True), rel=1e-3)


@pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
def test_historical_defect_forms_differ_from_quadrature(x):
    # the bessel1 form has the opposite sign; the bessel4 form misses -K(x,x)/2
    q1 = defect(BESSEL1, x).value
    assert defect_closed_form(BESSEL1, x) == pytest.approx(-q1, rel=1e-6)
    q4 = defect(BESSEL4, x).value
    assert abs(defect_closed_form(BESSEL4, x) - q4) > 1e-3 * abs(q4)


def test_sine_screening_truncations():
    assert screening_integral(SINE1, 0.0, 100.0) + 1.0 == pytest.approx(0.0, abs=2e-2)
    assert screening_integral(SINE4, 0.0, 200.0) + 0.5 == pytest.approx(0.0, abs=2e-2)
    assert abs(screening_residual(SINE1, 0.0).value) < 1e-8
    assert abs(screening_residual(SINE4, 0.0).value) < 1e-8
    with pytest.raises(ContractError):
        screening_integral(BESSEL4, 1.0, 10.0)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 5.0, 10.0])
@pytest.mark.parametrize("kernel", [BESSEL4, BESSEL1], ids=["bessel4", "bessel1"])
def test_bessel_pointwise_screening(kernel, x):
    r = screening_residual(kernel, x)
    assert abs(r.value) < 1e-6
    assert screening_residual_closed_form(kernel, x, corrected=True) == 0.0
    # the historical expressions are bounded away from zero at these points
    assert abs(screening_residual_closed_form(kernel, x)) > 1e-3


def test_screening_average_endpoints():
    assert screening_average(BESSEL4, 0.0).value == 0.0
    assert abs(screening_average(BESSEL4, 1e4, method="closed_form").value) <= 0.02
    r = screening_average(BESSEL4, 100.0)
    assert abs(r.value) < 1e-6
    with pytest.raises(ContractError):
        screening_average(BESSEL4, -1.0)


def test_domain_checks():
    with pytest.raises(DomainError):
        defect(BESSEL4, 0.0)
    with pytest.raises(DomainError):
        screening_residual(BESSEL1, -2.0)


# sweep ---------------------------------------------------------------------------


def test_sweep_single_row_and_csv():
    rows = variance_sweep(SINE1, 1.0, [10.0])
    assert len(rows) == 1
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "kernel,s,R,T,variance,err_estimate"
    fields = lines[1].split(",")
    assert fields[0] == "sine1" and fields[1] == ""
    assert float(fields[4]) == rows[0].variance


def test_sweep_sine1_decreasing():
    v = [r.variance for r in variance_sweep(SINE1, 1.0, [10.0, 100.0, 1000.0])]
    assert v[0] > v[1] > v[2] > 0


def test_sweep_contract():
    with pytest.raises(ContractError):
        variance_sweep(SINE1, 1.0, [])
    with pytest.raises(ContractError):
        variance_sweep(SINE1, 1.0, [100.0, 10.0])
    with pytest.raises(ContractError):
        variance_sweep(SINE1, 10.0, [10.0, 100.0])
