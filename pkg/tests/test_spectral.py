import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfaffpp.errors import ContractError, ResourceError
from pfaffpp.rigidity import indicator, variance_additive
from pfaffpp.kernels import matrix_kernel
from pfaffpp.spectral import (build_mollifier, check_linear_bound, closed_form_fhat_delta, fhat,
                              spectral_density, spectral_variance, stationary_profile,
                              write_spectral_csv)


def test_closed_form_examples():
    assert closed_form_fhat_delta("sine1", 1.0) == pytest.approx(2 - math.log(3), abs=1e-15)
    assert closed_form_fhat_delta("sine4", 1.5) == 0.5
    assert closed_form_fhat_delta("sine4", 2.0) == 0.5
    assert closed_form_fhat_delta("sine4", 0.5) == math.inf
    # branches agree at |l| = 1
    assert closed_form_fhat_delta("sine4", 1.0) == pytest.approx(0.5)
    with pytest.raises(ContractError):
        closed_form_fhat_delta("bessel4", 1.0)


@pytest.mark.parametrize("process", ["sine1", "sine4"])
def test_transform_at_zero_is_minus_intensity(process):
    rho = stationary_profile(process).rho
    assert fhat(process, 0.0) == pytest.approx(-rho, abs=1e-6)


@pytest.mark.parametrize("process", ["sine1", "sine4"])
@pytest.mark.parametrize("lam", [0.1, 0.3, 0.45, 0.7, 1.0, 1.6, 3.0])
def test_numeric_transform_matches_closed_form(process, lam):
    num = fhat(process, lam) - fhat(process, 0.0)
    assert num == pytest.approx(closed_form_fhat_delta(process, lam), abs=1e-5)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 5.0))
def test_transform_even(lam):
    assert fhat("sine1", lam) == fhat("sine1", -lam)
    assert closed_form_fhat_delta("sine4", lam) == closed_form_fhat_delta("sine4", -lam)


def test_density_vanishes_at_origin():
    g = indicator(-0.5, 0.5)
    assert abs(spectral_density("sine1", g, 0.0)) < 1e-6
    assert spectral_density("sine1", g, 0.3) > 0


@pytest.mark.parametrize("process", ["sine1", "sine4"])
def test_spectral_variance_matches_real_space(process):
    g = indicator(-0.5, 0.5)
    direct = variance_additive(matrix_kernel(process), g).value
    assert spectral_variance(process, g, lam_max=40.0) == pytest.approx(direct, abs=1e-3)


def test_linear_bound():
    r = check_linear_bound("sine1", 2.0, 2.1)
    assert r.passed and r.min_value >= 0 and r.max_ratio <= 2.1
    r4 = check_linear_bound("sine4", 0.4, 1.0)
    assert r4.passed
    tight = check_linear_bound("sine1", 2.0, 1.5)
    assert not tight.passed and tight.violations
    empty = check_linear_bound("sine1", 1.0, 0.1, points=0)
    assert empty.passed and empty.violations == ()
    with pytest.raises(ContractError):
        check_linear_bound("sine1", 0.0, 2.0)


@pytest.mark.parametrize("n", [1, 4, 16])
def test_mollifier(n):
    m = build_mollifier(n, 5.0)
    phi = m.statistic
    assert phi(0.0) == pytest.approx(1.0, abs=1e-10)
    xs = np.linspace(-5.0, 5.0, 401)
    assert np.max(np.abs(phi(xs) - 1.0)) <= 1.0 / n
    var = spectral_variance("sine1", phi)
    assert 0 <= var <= 1.0 / n


def test_mollifier_errors():
    with pytest.raises(ResourceError):
        build_mollifier(10_001, 1.0)
    with pytest.raises(ContractError):
        build_mollifier(0, 1.0)
    with pytest.raises(ContractError):
        build_mollifier(2, -1.0)


def test_spectral_csv():
    buf = io.StringIO()
    write_spectral_csv("sine1", [0.25, 1.0], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "process,lambda,fhat_delta_numeric,fhat_delta_closed,abs_err"
    assert len(lines) == 3
    row = lines[2].split(",")
    assert float(row[3]) == pytest.approx(2 - math.log(3))
    assert float(row[4]) < 1e-5
