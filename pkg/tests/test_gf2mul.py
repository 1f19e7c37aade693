import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gf2dense.bitmat import BitMatrix
from gf2dense.gf2mul import (MulConfig, addmul, addmul_m4rm, mul_m4rm, mul_naive,
                             mul_strassen, multiply, trsm_lower_left_unit,
                             trsm_upper_left_unit)

import oracles


def P(a):
    return BitMatrix.from_array(np.asarray(a, dtype=np.uint8))


def test_config_validation():
    with pytest.raises(ValueError):
        MulConfig(m4rm_k=0)
    with pytest.raises(ValueError):
        MulConfig(m4rm_k=17)
    with pytest.raises(ValueError):
        MulConfig(strassen_cutoff=32)


def test_naive_identity_and_zero(rng):
    b = oracles.rand01(rng, 7, 90)
    assert mul_naive(BitMatrix.identity(7), P(b)) == P(b)
    assert mul_naive(BitMatrix(5, 7), P(b)).is_zero()


def test_naive_all_3x3_left_factors(rng):
    b = oracles.rand01(rng, 3, 3)
    B = P(b)
    for bits in itertools.product((0, 1), repeat=9):
        a = np.array(bits, dtype=np.uint8).reshape(3, 3)
        expect = np.array([[sum(a[i, t] & b[t, j] for t in range(3)) % 2 for j in range(3)]
                           for i in range(3)], dtype=np.uint8)
        assert np.array_equal(mul_naive(P(a), B).to_array(), expect)


def test_dimension_mismatch():
    for fn in (mul_naive, mul_m4rm, mul_strassen):
        with pytest.raises(ValueError):
            fn(BitMatrix(2, 3), BitMatrix(4, 2))
    with pytest.raises(ValueError):
        addmul_m4rm(BitMatrix(3, 3), BitMatrix(2, 3), BitMatrix(3, 3))
    with pytest.raises(ValueError):
        multiply(BitMatrix(2, 2), BitMatrix(2, 2), backend="fast")


def test_m4rm_identity_any_k(rng):
    b = oracles.rand01(rng, 20, 75)
    for k in (1, 3, 8, 16):
        C = BitMatrix(20, 75)
        addmul_m4rm(C, BitMatrix.identity(20), P(b), MulConfig(m4rm_k=k))
        assert C == P(b)


@pytest.mark.parametrize("k,t", [(1, 1), (2, 1), (4, 1), (8, 1), (2, 4), (4, 4), (8, 4)])
def test_m4rm_against_naive(k, t, rng):
    a, b = oracles.rand01(rng, 96, 96), oracles.rand01(rng, 96, 96)
    assert mul_m4rm(P(a), P(b), MulConfig(m4rm_k=k, table_count=t)) == mul_naive(P(a), P(b))


def test_addmul_accumulates(rng):
    a, b, c = oracles.rand01(rng, 30, 40), oracles.rand01(rng, 40, 50), oracles.rand01(rng, 30, 50)
    C = P(c)
    addmul(C, P(a), P(b))
    assert np.array_equal(C.to_array(), c ^ oracles.matmul(a, b))


def test_strassen_delegates_below_cutoff(rng):
    a, b = oracles.rand01(rng, 50, 60), oracles.rand01(rng, 60, 70)
    cfg = MulConfig(m4rm_k=5)
    assert mul_strassen(P(a), P(b), cfg) == mul_m4rm(P(a), P(b), cfg)


def test_strassen_identity():
    rng = np.random.default_rng(1)
    b = oracles.rand01(rng, 200, 131)
    cfg = MulConfig(strassen_cutoff=64)
    assert mul_strassen(BitMatrix.identity(200), P(b), cfg) == P(b)


def test_strassen_odd_300(rng):
    a, b = oracles.rand01(rng, 300, 300), oracles.rand01(rng, 300, 300)
    cfg = MulConfig(strassen_cutoff=128)
    assert np.array_equal(mul_strassen(P(a), P(b), cfg).to_array(), oracles.matmul(a, b))


SHAPES = st.sampled_from([1, 2, 31, 63, 64, 65, 100, 129, 150])


@given(SHAPES, SHAPES, SHAPES, st.integers(0, 2 ** 32 - 1))
def test_all_backends_agree(m, l, n, seed):
    rng = np.random.default_rng(seed)
    a, b = oracles.rand01(rng, m, l), oracles.rand01(rng, l, n)
    ref = oracles.matmul(a, b)
    A, B = P(a), P(b)
    assert np.array_equal(mul_naive(A, B).to_array(), ref)
    assert np.array_equal(mul_m4rm(A, B).to_array(), ref)
    assert np.array_equal(mul_strassen(A, B, MulConfig(strassen_cutoff=64)).to_array(), ref)


@pytest.mark.parametrize("backend", ["naive", "m4rm", "strassen"])
def test_associativity(backend, rng):
    a, b, c = (oracles.rand01(rng, 40, 40) for _ in range(3))
    cfg = MulConfig(strassen_cutoff=64)
    A, B, C = P(a), P(b), P(c)
    lhs = multiply(multiply(A, B, backend, cfg), C, backend, cfg)
    rhs = multiply(A, multiply(B, C, backend, cfg), backend, cfg)
    assert lhs == rhs


# -- triangular solves -------------------------------------------------------------------


def unit_lower(rng, r):
    return (np.tril(oracles.rand01(rng, r, r), -1) + np.eye(r, dtype=np.uint8)).astype(np.uint8)


def test_trsm_identity(rng):
    b = oracles.rand01(rng, 9, 20)
    B = P(b)
    trsm_lower_left_unit(BitMatrix.identity(9), B)
    trsm_upper_left_unit(BitMatrix.identity(9), B)
    assert np.array_equal(B.to_array(), b)


def test_trsm_two_by_two():
    B = P([[1, 0, 1], [0, 1, 1]])
    trsm_lower_left_unit(P([[1, 0], [1, 1]]), B)
    assert B.to_array().tolist() == [[1, 0, 1], [1, 1, 0]]
    B = P([[1, 0, 1], [0, 1, 1]])
    trsm_upper_left_unit(P([[1, 1], [0, 1]]), B)
    assert B.to_array().tolist() == [[1, 1, 0], [0, 1, 1]]


@pytest.mark.parametrize("r", [16, 64, 65, 200])
def test_trsm_multiply_back(r, rng):
    L = unit_lower(rng, r)
    b = oracles.rand01(rng, r, 77)
    cfg = MulConfig(strassen_cutoff=64)
    X = P(b)
    trsm_lower_left_unit(P(L), X, cfg)
    assert np.array_equal(mul_naive(P(L), X).to_array(), b)
    U = L.T.copy()
    Y = P(b)
    trsm_upper_left_unit(P(U), Y, cfg)
    assert np.array_equal(oracles.matmul(U, Y.to_array()), b)


def test_trsm_ignores_entries_above_diagonal(rng):
    L = unit_lower(rng, 30)
    noisy = L | np.triu(oracles.rand01(rng, 30, 30), 1)
    b = oracles.rand01(rng, 30, 40)
    X, Y = P(b), P(b)
    trsm_lower_left_unit(P(L), X)
    trsm_lower_left_unit(P(noisy), Y)
    assert X == Y


def test_trsm_on_unaligned_view(rng):
    L = unit_lower(rng, 10)
    base = oracles.rand01(rng, 12, 100)
    A = P(base)
    trsm_lower_left_unit(P(L), A.view(1, 37, 10, 50))
    got = A.to_array()
    assert np.array_equal(oracles.matmul(L, got[1:11, 37:87]), base[1:11, 37:87])
    mask = np.ones_like(base, dtype=bool)
    mask[1:11, 37:87] = False
    assert np.array_equal(got[mask], base[mask])


def test_trsm_shape_errors():
    with pytest.raises(ValueError):
        trsm_lower_left_unit(BitMatrix(3, 4), BitMatrix(3, 2))
    with pytest.raises(ValueError):
        trsm_upper_left_unit(BitMatrix.identity(3), BitMatrix(4, 2))
