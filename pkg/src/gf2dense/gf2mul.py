"""Matrix products and unit-triangular solves over GF(2)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitmat import BitMatrix, as_matrix, row_ops
from .graycode import (DEFAULT_TABLES, MAX_K, default_k, effective_table_count,
                       make_tables, xor_rows_from_tables)

TRSM_BASE = 64


@dataclass
class MulConfig:
    """Tuning knobs for the table-based and Strassen-Winograd products.

    ``m4rm_k=None`` picks the table width from the operand size.
    """

    m4rm_k: int | None = None
    strassen_cutoff: int = 2048
    table_count: int = DEFAULT_TABLES

    def __post_init__(self):
        if self.m4rm_k is not None and not 1 <= self.m4rm_k <= MAX_K:
            raise ValueError(f"m4rm_k must be in [1, {MAX_K}], got {self.m4rm_k}")
        if self.strassen_cutoff < 64:
            raise ValueError("strassen_cutoff must be at least 64")

    def k_for(self, A: BitMatrix, B: BitMatrix) -> int:
        if self.m4rm_k is not None:
            return self.m4rm_k
        return default_k(max(2, min(A.nrows, A.ncols, B.ncols)))


def _check_inner(A, B):
    if A.ncols != B.nrows:
        raise ValueError(f"dimension mismatch: {A.nrows}x{A.ncols} times {B.nrows}x{B.ncols}")


def mul_naive(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """Product by row accumulation: row ``i`` of ``C`` is the sum of the rows of
    ``B`` selected by row ``i`` of ``A``."""
    _check_inner(A, B)
    C = BitMatrix(A.nrows, B.ncols)
    if C.stride == 0 or A.ncols == 0:
        return C
    bits = A.to_array().astype(bool)
    for i in range(A.nrows):
        sel = np.flatnonzero(bits[i])
        if len(sel):
            C.data[i] = np.bitwise_xor.reduce(B.data[sel], axis=0)
            row_ops.add(len(sel))
    return C


def addmul_m4rm(C: BitMatrix, A: BitMatrix, B: BitMatrix, cfg: MulConfig | None = None):
    """``C += A * B`` with Gray tables over ``k``-row slabs of ``B``."""
    _check_inner(A, B)
    if C.shape != (A.nrows, B.ncols):
        raise ValueError(f"C has shape {C.shape}, expected {(A.nrows, B.ncols)}")
    cfg = cfg or MulConfig()
    if A.nrows == 0 or B.ncols == 0:
        return C
    k = cfg.k_for(A, B)
    for t0 in range(0, A.ncols, k):
        kk = min(k, A.ncols - t0)
        tabs = make_tables(B, t0, 0, kk, effective_table_count(kk, cfg.table_count))
        v = A.read_bits_rows(0, A.nrows, t0, kk)
        xor_rows_from_tables(C, 0, C.nrows, v, kk, tabs)
    return C


def mul_m4rm(A: BitMatrix, B: BitMatrix, cfg: MulConfig | None = None) -> BitMatrix:
    return addmul_m4rm(BitMatrix(A.nrows, B.ncols), A, B, cfg)


def _block(M: BitMatrix, r, c, h, w) -> BitMatrix:
    return M.submatrix(r, c, h, w)


def _winograd(A: BitMatrix, B: BitMatrix, cfg: MulConfig) -> BitMatrix:
    """Even-dimension Strassen-Winograd step (7 products, 15 additions)."""
    m2, l2, n2 = A.nrows // 2, A.ncols // 2, B.ncols // 2
    A11, A12 = _block(A, 0, 0, m2, l2), _block(A, 0, l2, m2, l2)
    A21, A22 = _block(A, m2, 0, m2, l2), _block(A, m2, l2, m2, l2)
    B11, B12 = _block(B, 0, 0, l2, n2), _block(B, 0, n2, l2, n2)
    B21, B22 = _block(B, l2, 0, l2, n2), _block(B, l2, n2, l2, n2)

    S1 = A21 + A22
    S2 = S1 + A11
    S3 = A11 + A21
    S4 = A12 + S2
    T1 = B12 + B11
    T2 = B22 + T1
    T3 = B22 + B12
    T4 = T2 + B21

    P1 = mul_strassen(A11, B11, cfg)
    P2 = mul_strassen(A12, B21, cfg)
    P3 = mul_strassen(S4, B22, cfg)
    P4 = mul_strassen(A22, T4, cfg)
    P5 = mul_strassen(S1, T1, cfg)
    P6 = mul_strassen(S2, T2, cfg)
    P7 = mul_strassen(S3, T3, cfg)

    U1 = P1 + P2
    U2 = P1 + P6
    U3 = U2 + P7
    U4 = U2 + P5
    U5 = U4 + P3
    U6 = U3 + P4
    U7 = U3 + P5

    C = BitMatrix(2 * m2, 2 * n2)
    C.view(0, 0, m2, n2).assign(U1)
    C.view(0, n2, m2, n2).assign(U5)
    C.view(m2, 0, m2, n2).assign(U6)
    C.view(m2, n2, m2, n2).assign(U7)
    return C


def mul_strassen(A: BitMatrix, B: BitMatrix, cfg: MulConfig | None = None) -> BitMatrix:
    """Strassen-Winograd product; recursion stops below ``cfg.strassen_cutoff``.

    Odd dimensions are peeled: the even leading block goes through the
    recursion and the remaining row, column and inner slice are fixed up with
    thin table products.
    """
    _check_inner(A, B)
    cfg = cfg or MulConfig()
    m, l, n = A.nrows, A.ncols, B.ncols
    if min(m, l, n) <= cfg.strassen_cutoff:
        return mul_m4rm(A, B, cfg)
    me, le, ne = m & ~1, l & ~1, n & ~1
    C = BitMatrix(m, n)
    C.view(0, 0, me, ne).assign(
        _winograd(_block(A, 0, 0, me, le), _block(B, 0, 0, le, ne), cfg))
    if le < l:
        extra = mul_m4rm(_block(A, 0, le, me, l - le), _block(B, le, 0, l - le, ne), cfg)
        C.view(0, 0, me, ne).xor_assign(extra)
    if ne < n:
        C.view(0, ne, me, n - ne).assign(
            mul_m4rm(_block(A, 0, 0, me, l), _block(B, 0, ne, l, n - ne), cfg))
    if me < m:
        C.view(me, 0, m - me, n).assign(mul_m4rm(_block(A, me, 0, m - me, l), B, cfg))
    return C


def multiply(A: BitMatrix, B: BitMatrix, backend: str = "m4rm",
             cfg: MulConfig | None = None) -> BitMatrix:
    if backend == "naive":
        return mul_naive(A, B)
    if backend == "m4rm":
        return mul_m4rm(A, B, cfg)
    if backend == "strassen":
        return mul_strassen(A, B, cfg)
    raise ValueError(f"unknown backend {backend!r}")


def addmul(C: BitMatrix, A: BitMatrix, B: BitMatrix, cfg: MulConfig | None = None):
    """``C += A * B`` choosing Strassen-Winograd above the cutoff."""
    cfg = cfg or MulConfig()
    if min(A.nrows, A.ncols, B.ncols) <= cfg.strassen_cutoff:
        return addmul_m4rm(C, A, B, cfg)
    C ^= mul_strassen(A, B, cfg)
    return C


# -- triangular solves -----------------------------------------------------------


def _substitute(L: BitMatrix, B: BitMatrix, lower: bool):
    r = L.nrows
    rows = L.to_row_ints()
    order = range(r) if lower else range(r - 1, -1, -1)
    for i in order:
        coeffs = rows[i] & ((1 << i) - 1) if lower else rows[i] >> (i + 1) << (i + 1)
        if not coeffs:
            continue
        sel = [j for j in range(r) if coeffs >> j & 1]
        B.data[i] ^= np.bitwise_xor.reduce(B.data[sel], axis=0)
        row_ops.add(len(sel))


def _split_point(r: int) -> int:
    half = r // 2
    aligned = half - half % 64
    return aligned if aligned > 0 else half


def _trsm(L: BitMatrix, B: BitMatrix, lower: bool, cfg: MulConfig):
    r = L.nrows
    if r <= TRSM_BASE:
        _substitute(L, B, lower)
        return
    h = _split_point(r)
    top, bot = B.view(0, 0, h, B.ncols), B.view(h, 0, r - h, B.ncols)
    if lower:
        Bt = top.materialize()
        _trsm(L.submatrix(0, 0, h, h), Bt, True, cfg)
        top.assign(Bt)
        Bb = bot.materialize()
        addmul(Bb, L.submatrix(h, 0, r - h, h), Bt, cfg)
        _trsm(L.submatrix(h, h, r - h, r - h), Bb, True, cfg)
        bot.assign(Bb)
    else:
        Bb = bot.materialize()
        _trsm(L.submatrix(h, h, r - h, r - h), Bb, False, cfg)
        bot.assign(Bb)
        Bt = top.materialize()
        addmul(Bt, L.submatrix(0, h, h, r - h), Bb, cfg)
        _trsm(L.submatrix(0, 0, h, h), Bt, False, cfg)
        top.assign(Bt)


def _trsm_entry(T, B, lower, cfg):
    T, _ = as_matrix(T)
    if T.nrows != T.ncols:
        raise ValueError(f"triangular factor must be square, got {T.shape}")
    M, back = as_matrix(B)
    if M.nrows != T.nrows:
        raise ValueError(f"row mismatch: {T.nrows}x{T.ncols} factor, {M.nrows} right-hand rows")
    if M.ncols and M.nrows:
        _trsm(T, M, lower, cfg or MulConfig())
    if back is not None:
        back.assign(M)
    return B


def trsm_lower_left_unit(L, B, cfg: MulConfig | None = None):
    """Overwrite ``B`` with ``L^-1 B`` for unit lower triangular ``L``.

    Only the strictly lower part of ``L`` is read, so a space-shared
    ``L\\E`` block can be passed directly.
    """
    return _trsm_entry(L, B, True, cfg)


def trsm_upper_left_unit(U, B, cfg: MulConfig | None = None):
    """Overwrite ``B`` with ``U^-1 B`` for unit upper triangular ``U``."""
    return _trsm_entry(U, B, False, cfg)
