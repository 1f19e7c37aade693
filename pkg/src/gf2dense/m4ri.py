"""Table-driven Gaussian elimination (the "Four Russians" inversion method)."""

from __future__ import annotations

from typing import Callable

from .bitmat import BitMatrix, as_matrix
from .graycode import (DEFAULT_TABLES, GrayTables, add_rows_from_table, default_k,
                       effective_table_count, make_tables)


def gauss_submatrix(A: BitMatrix, r: int, c: int, k: int, r_end: int) -> int:
    """Reduce a ``k``-row block starting at ``(r, c)`` to RREF, searching pivots
    in rows ``r .. r_end-1``.

    Candidate rows have their already-processed block columns cleared as they
    are inspected. Stops at the first of the ``k`` columns without a pivot and
    returns the number of pivots found.
    """
    d = A.data

    def bit(i, j):
        return int(d[i, j >> 6]) >> (j & 63) & 1

    r_start = r
    for j in range(c, c + k):
        found = False
        for i in range(r_start, r_end):
            for l in range(j - c):
                if bit(i, c + l):
                    A.row_add_from(i, r + l, c + l)
            if bit(i, j):
                A.swap_rows(i, r_start)
                for l in range(r, r_start):
                    if bit(l, j):
                        A.row_add_from(l, r_start, j)
                r_start += 1
                found = True
                break
        if not found:
            return j - c
    return k


TraceHook = Callable[[BitMatrix, int, int, int, "list[GrayTables]"], None]


def m4ri_echelonize(A, k: int | None = 0, full: bool = True, tables: int = 1,
                    trace: TraceHook | None = None) -> int:
    """Echelonize ``A`` in place with ``k``-column Gray tables; returns the rank.

    ``full=True`` produces the reduced row echelon form. With ``full=False``
    rows above the current block are not cleared, leaving a row echelon
    form. ``k`` of 0 or None selects a width from the matrix size.
    ``trace(A, r, c, kbar, tables)`` is called after each table is built.
    """
    M, back = as_matrix(A)
    m, n = M.shape
    if not k:
        k = default_k(max(2, min(m, n)))
    if k < 1 or k > 16:
        raise ValueError(f"k must be in [1, 16], got {k}")
    r = c = 0
    while c < n and r < m:
        if c + k > n:
            k = n - c
        kbar = gauss_submatrix(M, r, c, k, m)
        if kbar > 0:
            tabs = make_tables(M, r, c, kbar, effective_table_count(kbar, tables))
            if trace is not None:
                trace(M, r, c, kbar, tabs)
            if full:
                add_rows_from_table(M, 0, r, c, kbar, tabs)
            add_rows_from_table(M, r + kbar, m, c, kbar, tabs)
        r += kbar
        c += kbar
        if k != kbar:
            c += 1
    if back is not None:
        back.assign(M)
    return r


__all__ = ["gauss_submatrix", "m4ri_echelonize", "DEFAULT_TABLES"]
