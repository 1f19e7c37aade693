"""Straightforward Gauss-Jordan elimination used for verification."""

from __future__ import annotations

from .bitmat import BitMatrix, as_matrix


def rref_rows(rows: list, n: int, full: bool = True) -> tuple[list, list]:
    """Echelonize integer rows (bit ``j`` = column ``j``); returns ``(rows, pivots)``."""
    rows = list(rows)
    pivots = []
    r = 0
    for j in range(n):
        bit = 1 << j
        piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r]
        for i in range(r + 1 if not full else 0, len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= p
        pivots.append(j)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def naive_rref(A) -> tuple[BitMatrix, int, list]:
    """Return ``(R, rank, pivot_columns)`` without modifying ``A``."""
    M, _ = as_matrix(A)
    rows, piv = rref_rows(M.to_row_ints(), M.ncols)
    return BitMatrix.from_row_ints(rows, M.ncols), len(piv), piv


def naive_rank(A) -> int:
    return naive_rref(A)[1]


def naive_echelonize(A, full: bool = True) -> int:
    M, back = as_matrix(A)
    rows, piv = rref_rows(M.to_row_ints(), M.ncols, full)
    M.set_row_ints(rows)
    if back is not None:
        back.assign(M)
    return len(piv)
