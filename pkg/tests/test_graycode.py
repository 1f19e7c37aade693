import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gf2dense.bitmat import BitMatrix, reverse_bits, row_ops
from gf2dense.graycode import (add_rows_from_table, default_k, effective_table_count,
                               gray_code, gray_flip_index, gray_sequence, lookup_sum,
                               make_multiplier_table, make_table, make_tables,
                               postprocess_tables, split_tables, xor_rows_from_tables)

import oracles


def combination(a, r0, c0, v, k):
    """XOR of source rows selected MSB-first by ``v``, from column ``c0`` on."""
    out = np.zeros(a.shape[1] - c0, dtype=np.uint8)
    for t in range(k):
        if v >> (k - 1 - t) & 1:
            out ^= a[r0 + t, c0:]
    return out


def table_rows(tabs, v_values):
    """Unpack looked-up rows into 0/1 arrays covering columns ``col_start..``."""
    tab = tabs[0]
    rows = lookup_sum(tabs, np.asarray(v_values), sum(t.k for t in tabs))
    full = np.zeros((rows.shape[0], tab.word_offset + rows.shape[1]), dtype=np.uint64)
    full[:, tab.word_offset:] = rows
    M = BitMatrix(rows.shape[0], tab.ncols, full[:, :(tab.ncols + 63) // 64])
    return M.to_array()[:, tab.col_start:]


def test_gray_flip_examples():
    assert gray_flip_index(1) == 0
    assert gray_flip_index(2) == 1
    with pytest.raises(ValueError):
        gray_flip_index(0)


@pytest.mark.parametrize("k", range(1, 11))
def test_gray_sequence_visits_everything_once(k):
    seq = gray_sequence(k)
    assert sorted(seq.tolist()) == list(range(1 << k))
    for step in range(1, 1 << k):
        diff = int(seq[step] ^ seq[step - 1])
        assert diff == 1 << gray_flip_index(step)
        assert diff == gray_code(step) ^ gray_code(step - 1)


def test_default_k():
    assert default_k(1) == 1
    assert default_k(1024) == 7
    assert default_k(4096) == 9
    assert default_k(2 ** 40) == 16


def test_make_table_single_row():
    A = BitMatrix.from_array([[1, 0, 1, 1]])
    (tab,) = make_tables(A, 0, 0, 1)
    assert tab.to_bitmatrix().to_array().tolist() == [[0, 0, 0, 0], [1, 0, 1, 1]]
    assert tab.L.tolist() == [0, 1]


@pytest.mark.parametrize("k", range(1, 9))
def test_table_entries_and_cost(k, rng):
    a = oracles.rand01(rng, k + 3, 150)
    A = BitMatrix.from_array(a)
    row_ops.reset()
    tab = make_table(A, 2, 37, k)
    assert row_ops.count == 2 ** k - 1
    got = tab.to_bitmatrix().to_array()
    for v in range(2 ** k):
        assert np.array_equal(got[v], combination(a, 2, 37, v, k))


def test_table_rows_are_gray_neighbours(rng):
    a = oracles.rand01(rng, 5, 70)
    tab = make_table(BitMatrix.from_array(a), 0, 0, 5)
    stored = tab.to_bitmatrix(order="gray").to_array()
    assert not stored[0].any()
    for p in range(1, 32):
        diff = stored[p] ^ stored[p - 1]
        assert any(np.array_equal(diff, a[t]) for t in range(5))


def test_table_span_property(rng):
    a = oracles.rand01(rng, 4, 40)
    while oracles.rank(a) < 4:
        a = oracles.rand01(rng, 4, 40)
    got = {tuple(r) for r in make_table(BitMatrix.from_array(a), 0, 0, 4).to_bitmatrix().to_array()}
    brute = {tuple(np.bitwise_xor.reduce(a[list(s)], axis=0)) if s else tuple([0] * 40)
             for n in range(5) for s in itertools.combinations(range(4), n)}
    assert got == brute and len(got) == 16


@pytest.mark.parametrize("k", [0, 17])
def test_make_table_rejects_k(k):
    with pytest.raises(ValueError):
        make_table(BitMatrix(20, 20), 0, 0, k)


def test_make_table_rejects_missing_rows():
    with pytest.raises(IndexError):
        make_table(BitMatrix(3, 20), 1, 0, 3)


def test_split_tables():
    assert split_tables(8, 1) == [8]
    assert split_tables(8, 4) == [2, 2, 2, 2]
    assert split_tables(7, 4) == [2, 2, 2, 1]
    with pytest.raises(ValueError):
        split_tables(3, 4)
    with pytest.raises(ValueError):
        split_tables(8, 3)
    assert effective_table_count(3, 4) == 2
    assert effective_table_count(16, 8) == 8


def _echelon_top_block(rng, m, n, k):
    """Random matrix whose first ``k`` rows are in RREF on columns ``0..k-1``."""
    a = oracles.rand01(rng, m, n)
    a[:k, :k] = np.eye(k, dtype=np.uint8)
    return a


def test_add_rows_clears_index_columns(rng):
    a = _echelon_top_block(rng, 20, 40, 4)
    A = BitMatrix.from_array(a)
    tab = make_table(A, 0, 0, 4)
    add_rows_from_table(A, 4, 20, 0, 4, tab)
    expect = a.copy()
    for i in range(4, 20):
        for t in range(4):
            if expect[i, t]:
                expect[i] ^= expect[t]
    assert np.array_equal(A.to_array(), expect)
    assert not A.to_array()[4:, :4].any()


def test_add_rows_zero_index_leaves_row(rng):
    a = _echelon_top_block(rng, 6, 30, 3)
    a[5, :3] = 0
    A = BitMatrix.from_array(a)
    add_rows_from_table(A, 5, 6, 0, 3, make_table(A, 0, 0, 3))
    assert np.array_equal(A.to_array()[5], a[5])


def test_add_rows_is_idempotent_on_cleared_rows(rng):
    A = BitMatrix.from_array(_echelon_top_block(rng, 30, 70, 5))
    tab = make_table(A, 0, 0, 5)
    add_rows_from_table(A, 5, 30, 0, 5, tab)
    once = A.copy()
    add_rows_from_table(A, 5, 30, 0, 5, tab)
    assert A == once


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 4, 8]), st.integers(0, 40))
def test_multi_table_equals_single_table(seed, t, c0):
    rng = np.random.default_rng(seed)
    k = 8
    a = _echelon_top_block(rng, 32, 64 + c0, k)
    a[:k] = np.roll(a[:k], c0, axis=1)
    single, multi = BitMatrix.from_array(a), BitMatrix.from_array(a)
    add_rows_from_table(single, k, 32, c0, k, make_tables(single, 0, c0, k, 1))
    add_rows_from_table(multi, k, 32, c0, k, make_tables(multi, 0, c0, k, t))
    assert single == multi


def test_multi_table_lookup_counts_per_table(rng):
    A = BitMatrix.from_array(_echelon_top_block(rng, 12, 40, 8))
    tabs = make_tables(A, 0, 0, 8, 4)
    row_ops.reset()
    xor_rows_from_tables(A, 8, 12, A.read_bits_rows(8, 12, 0, 8), 8, tabs)
    assert row_ops.count == 4 * 4


def test_multiplier_table_basics():
    # echelon block with rows [1 0 1], [0 1 0], [0 0 1]
    patterns = [0b101, 0b010, 0b001]
    M = make_multiplier_table(patterns, 3)
    assert M[0] == 0
    for t, p in enumerate(patterns):
        assert M[p] == 1 << (2 - t)
    for v in range(8):
        u = int(M[v])
        got = 0
        for t in range(3):
            if u >> (2 - t) & 1:
                got ^= patterns[t]
        assert got == v
    with pytest.raises(ValueError):
        make_multiplier_table([0b110, 0b110, 0b001], 3)


def test_postprocessed_row_leaves_multipliers():
    # first source row starts [1 0 1]; clearing a row starting [1 0 1] uses that row alone
    a = np.array([[1, 0, 1, 1, 1, 0, 0, 1],
                  [0, 1, 0, 0, 1, 1, 0, 1],
                  [0, 0, 1, 1, 0, 1, 1, 0],
                  [1, 0, 1, 0, 0, 1, 1, 1]], dtype=np.uint8)
    A = BitMatrix.from_array(a)
    tabs = make_tables(A, 0, 0, 3)
    patterns = [reverse_bits(A.row_int(t) & 0b111, 3) for t in range(3)]
    mult = make_multiplier_table(patterns, 3)
    v = A.read_bits(3, 0, 3)
    assert v == 5 and mult[v] == 0b100
    postprocess_tables(tabs, 3, 0)
    xor_rows_from_tables(A, 3, 4, mult[[v]], 3, tabs)
    row = A.to_array()[3]
    assert row[:3].tolist() == [1, 0, 0]
    assert np.array_equal(row[3:], a[3, 3:] ^ a[0, 3:])


def test_postprocess_across_word_boundary(rng):
    a = oracles.rand01(rng, 5, 140)
    A = BitMatrix.from_array(a)
    tabs = make_tables(A, 0, 60, 5, 2)
    postprocess_tables(tabs, 5, 61)
    rows = table_rows(tabs, range(32))
    for v in range(32):
        expect = combination(a, 0, 60, v, 5)
        expect[1:6] ^= np.array([v >> (4 - t) & 1 for t in range(5)], dtype=np.uint8)
        assert np.array_equal(rows[v], expect)
