import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfaffpp import ContractError, pfaffian, pfaffian_ex

from _oracles import pfaffian_by_matchings


def _skew(rng, n):
    a = rng.standard_normal((n, n))
    return a - a.T


def test_two_by_two():
    assert pfaffian([[0.0, 3.5], [-3.5, 0.0]]) == 3.5


def test_four_by_four_closed_form():
    rng = np.random.default_rng(1)
    a = _skew(rng, 4)
    expected = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
    assert pfaffian(a) == pytest.approx(expected, abs=1e-12)


def test_eight_by_eight_against_lu_determinant():
    rng = np.random.default_rng(2)
    a = _skew(rng, 8)
    det = np.linalg.det(a)  # LAPACK getrf, partial pivoting
    assert pfaffian(a) ** 2 == pytest.approx(det, rel=1e-9)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_matches_matching_expansion(n):
    rng = np.random.default_rng(n)
    a = _skew(rng, n)
    assert pfaffian(a) == pytest.approx(pfaffian_by_matchings(a), rel=1e-11, abs=1e-12)


def test_odd_dimension_rejected():
    with pytest.raises(ContractError):
        pfaffian(np.zeros((3, 3)))


def test_non_antisymmetric_rejected():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(ContractError):
        pfaffian(a)


def test_singular_flagged():
    r = pfaffian_ex(np.zeros((4, 4)))
    assert r.value == 0.0 and r.degenerate
    a = np.zeros((4, 4))
    a[0, 1], a[1, 0] = 1.0, -1.0
    assert pfaffian_ex(a) == (0.0, True)


def test_input_not_modified():
    rng = np.random.default_rng(3)
    a = _skew(rng, 6)
    b = a.copy()
    pfaffian(a)
    np.testing.assert_array_equal(a, b)


dims = st.integers(1, 10).map(lambda k: 2 * k)
seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_square_is_determinant(n, seed):
    a = _skew(np.random.default_rng(seed), n)
    det = np.linalg.det(a)
    assert pfaffian(a) ** 2 == pytest.approx(det, rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).map(lambda k: 2 * k), seeds)
def test_congruence(n, seed):
    rng = np.random.default_rng(seed)
    a = _skew(rng, n)
    b = rng.standard_normal((n, n))
    lhs = pfaffian(b @ a @ b.T)
    rhs = np.linalg.det(b) * pfaffian(a)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(dims, seeds, st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3))
def test_homogeneity(n, seed, lam):
    a = _skew(np.random.default_rng(seed), n)
    assert pfaffian(lam * a) == pytest.approx(lam ** (n // 2) * pfaffian(a), rel=1e-9, abs=1e-12)
