import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfaffpp.errors import ContractError
from pfaffpp.kernels import matrix_kernel
from pfaffpp.occupation import (IntervalGrid, cov_abs_tail, cov_total_sum, covariance_series,
                                divergence_probe_sine4_lambda1, occupation_cov, write_occupation_csv)
from pfaffpp.rigidity import indicator, variance_additive
from pfaffpp.stationary import stationary_profile


@pytest.mark.parametrize("process", ["sine1", "sine4"])
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.5])
def test_cov0_is_count_variance(process, lam):
    v = variance_additive(matrix_kernel(process), indicator(-lam / 2, lam / 2)).value
    assert occupation_cov(process, lam, 0) == pytest.approx(v, abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0), st.integers(0, 30))
def test_symmetry(lam, n):
    assert occupation_cov("sine1", lam, n) == occupation_cov("sine1", lam, -n)


def test_cross_covariance_against_real_space():
    # Cov(X_0, X_n) = (Var(X_0 + X_n) - 2 Var X_0) / 2 for n >= 2 (disjoint, non-adjacent)
    K = matrix_kernel("sine1")
    var0 = variance_additive(K, indicator(-0.5, 0.5)).value

    def both(x):
        x = np.asarray(x)
        return (((x >= -0.5) & (x < 0.5)) | ((x >= 2.5) & (x < 3.5))).astype(float)

    from pfaffpp.rigidity import AdditiveStatistic
    s = AdditiveStatistic(both, (-0.5, 3.5), (0.5, 2.5))
    v = variance_additive(K, s).value
    assert occupation_cov("sine1", 1.0, 3) == pytest.approx(0.5 * (v - 2 * var0), abs=1e-8)


def test_sine1_decay_envelope():
    prof = stationary_profile("sine1")
    C = prof.envelope_constant()
    n = 50
    assert abs(occupation_cov("sine1", 1.0, n)) <= C / (n - 1) ** 2


def test_total_sums_small():
    assert abs(cov_total_sum(covariance_series("sine1", 1.0, 100), 100).value) <= 0.02
    assert abs(cov_total_sum(covariance_series("sine4", 2.0, 200), 200).value) <= 0.02
    s = covariance_series("sine1", 1.0, 10)
    assert cov_total_sum(s, 0).value == s.cov(0)
    with pytest.raises(ContractError):
        cov_total_sum(s, 11)


def test_abs_tail_bounded():
    s = covariance_series("sine1", 1.0, 400)
    scaled = [cov_abs_tail(s, N).scaled for N in (10, 20, 50, 100)]
    assert max(scaled) <= 2 * min(scaled)
    with pytest.raises(ContractError):
        cov_abs_tail(covariance_series("sine4", 1.0, 50), 10)
    with pytest.raises(ContractError):
        cov_abs_tail(s, 0)


def test_series_bounds():
    s = covariance_series("sine1", 1.0, 20)
    assert s.n_max == 20
    with pytest.raises(ContractError):
        s.cov(21)
    assert covariance_series("sine4", 1.0, 20).tail_constant is None
    assert covariance_series("sine4", 2.0, 20).tail_constant is not None
    with pytest.raises(ContractError):
        covariance_series("bessel4", 1.0)
    with pytest.raises(ContractError):
        occupation_cov("sine1", 0.0, 1)


def test_divergence_probe_nondecreasing():
    rows = divergence_probe_sine4_lambda1([10, 100, 400])
    vals = [v for _, v in rows]
    assert vals == sorted(vals)
    assert divergence_probe_sine4_lambda1([]) == []
    with pytest.raises(ContractError):
        divergence_probe_sine4_lambda1([-1])


def test_sine4_lambda1_harmonic_envelope():
    # the cos(pi v)/(8 v) tail of F against a unit tent gives (-1)^n / (2 pi^2 n) + O(n^-2),
    # inside the cruder envelope lam/(8 n)
    for n in (100, 101, 200, 400):
        c = occupation_cov("sine4", 1.0, n)
        assert abs(c) <= 1.0 / (8 * n) + 1.0 / n ** 2
        assert c == pytest.approx((-1) ** n / (2 * math.pi ** 2 * n), abs=1.0 / n ** 2)


def test_interval_grid():
    g = IntervalGrid(2.0)
    assert g.interval(0) == (-1.0, 1.0)
    assert g.interval(3) == (5.0, 7.0)
    assert list(g.index([-1.0, 0.99, 1.0, 6.5])) == [0, 0, 1, 3]
    with pytest.raises(ContractError):
        IntervalGrid(0.0)


def test_csv():
    buf = io.StringIO()
    write_occupation_csv(covariance_series("sine1", 1.0, 3), buf, N=2)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "process,lambda,n,cov"
    assert len(lines) == 6
    assert lines[1].split(",")[2] == "-2" and lines[1].split(",")[3] == lines[5].split(",")[3]
