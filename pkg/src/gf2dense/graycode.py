"""Gray-code combination tables and table-driven row elimination.

A table built from ``k`` source rows holds all ``2**k`` XOR combinations of
those rows, laid out in Gray-code order so that each entry costs exactly one
vector addition. Combinations are named by a ``k``-bit integer ``v`` read
most-significant-bit first: bit ``k-1-t`` of ``v`` selects source row ``t``,
the same convention :meth:`BitMatrix.read_bits` uses for matrix entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bitmat import WORD_BITS, BitMatrix, bit_reverse_table, prefix_masks, row_ops

MAX_K = 16
DEFAULT_K_SCALE = 0.75
DEFAULT_TABLES = 4
VALID_TABLE_COUNTS = (1, 2, 4, 8)


def gray_code(x):
    return x ^ (x >> 1)


def gray_flip_index(step: int) -> int:
    """Bit in which the Gray codes of ``step - 1`` and ``step`` differ."""
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    return (step & -step).bit_length() - 1


def gray_sequence(k: int) -> np.ndarray:
    x = np.arange(1 << k, dtype=np.int64)
    return x ^ (x >> 1)


def default_k(n: int, scale: float = DEFAULT_K_SCALE) -> int:
    """Table width heuristic ``clamp(floor(scale * log2 n), 1, 16)``."""
    if n <= 2:
        return 1
    return max(1, min(MAX_K, int(math.floor(scale * math.log2(n)))))


def _check_k(k):
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be in [1, {MAX_K}], got {k}")


@dataclass
class GrayTables:
    """All combinations of ``k`` source rows.

    Attributes
    ----------
    k : int
        Number of source rows (bits per index).
    T : ndarray of uint64, shape (2**k, nwords)
        Row ``p`` is the combination ``gray_code(p)``. Words are aligned with
        the source matrix starting at word ``word_offset``; columns left of
        ``col_start`` are zero.
    L : ndarray of intp, shape (2**k,)
        ``T[L[v]]`` is the combination selected by ``v``.
    offset : int
        Position of the first source row within a larger split (see
        :func:`make_tables`).
    """

    k: int
    T: np.ndarray
    L: np.ndarray
    col_start: int
    ncols: int
    word_offset: int
    additions: int = 0
    offset: int = 0

    def combination(self, v: int) -> np.ndarray:
        return self.T[self.L[v]]

    def to_bitmatrix(self, order: str = "index") -> BitMatrix:
        """Table rows as a ``2**k x (ncols - col_start)`` matrix.

        ``order="index"`` lists ``T[L[0]], T[L[1]], ...``; ``order="gray"``
        lists the rows in storage (Gray) order.
        """
        rows = self.T[self.L] if order == "index" else self.T
        full = np.zeros((rows.shape[0], self.word_offset + rows.shape[1]), dtype=np.uint64)
        full[:, self.word_offset:] = rows
        tmp = BitMatrix(rows.shape[0], self.ncols, full[:, :(self.ncols + 63) // 64])
        return tmp.submatrix(0, self.col_start, rows.shape[0], self.ncols - self.col_start)


def _source_words(A: BitMatrix, r_start: int, c_start: int, k: int) -> np.ndarray:
    w0 = c_start // WORD_BITS
    src = A.data[r_start:r_start + k, w0:].copy()
    if src.shape[1]:
        src[:, 0] &= ~prefix_masks([c_start - w0 * WORD_BITS], 1)[0, 0]
    return src


def _gray_fill(T: np.ndarray, src: np.ndarray, k: int):
    """Reflected Gray construction: one vector addition per new table row."""
    T[0] = 0
    for i in range(k):
        h = 1 << i
        T[h:2 * h] = T[h - 1::-1] ^ src[k - 1 - i]


def make_table(A: BitMatrix, r_start: int, c_start: int, k: int, *,
               offset: int = 0) -> GrayTables:
    """Build the table of all combinations of rows ``r_start .. r_start+k-1``.

    Table rows cover columns ``c_start`` onwards. Exactly ``2**k - 1``
    vector additions are performed.
    """
    _check_k(k)
    if r_start < 0 or r_start + k > A.nrows:
        raise IndexError(f"source rows [{r_start}, {r_start + k}) out of range")
    if not 0 <= c_start <= A.ncols:
        raise IndexError(f"column {c_start} out of range")
    src = _source_words(A, r_start, c_start, k)
    T = np.empty((1 << k, src.shape[1]), dtype=np.uint64)
    _gray_fill(T, src, k)
    adds = (1 << k) - 1
    row_ops.add(adds)
    L = np.empty(1 << k, dtype=np.intp)
    L[gray_sequence(k)] = np.arange(1 << k)
    return GrayTables(k, T, L, c_start, A.ncols, c_start // WORD_BITS, adds, offset)


def split_tables(k: int, t: int) -> list[int]:
    """Split ``k`` into ``t`` near-equal chunk sizes, larger chunks first."""
    if t not in VALID_TABLE_COUNTS:
        raise ValueError(f"table count must be one of {VALID_TABLE_COUNTS}, got {t}")
    if t > k:
        raise ValueError(f"cannot split k={k} into {t} tables")
    q, rem = divmod(k, t)
    return [q + 1] * rem + [q] * (t - rem)


def effective_table_count(k: int, t: int) -> int:
    """Largest admissible table count not exceeding ``t`` or ``k``."""
    return max(c for c in VALID_TABLE_COUNTS if c <= max(1, min(t, k)))


def make_tables(A: BitMatrix, r_start: int, c_start: int, k: int,
                t: int = 1) -> list[GrayTables]:
    """One table per chunk of :func:`split_tables`; chunk ``j`` covers its own source rows."""
    out = []
    off = 0
    for kj in split_tables(k, t):
        out.append(make_table(A, r_start + off, c_start, kj, offset=off))
        off += kj
    return out


def _as_list(tables) -> list[GrayTables]:
    return [tables] if isinstance(tables, GrayTables) else list(tables)


def lookup_sum(tables, v: np.ndarray, k: int) -> np.ndarray:
    """Sum over chunks of the table rows selected by the index vector ``v``."""
    tabs = _as_list(tables)
    acc = None
    for tab in tabs:
        shift = k - tab.offset - tab.k
        sub = (v >> shift) & ((1 << tab.k) - 1) if len(tabs) > 1 else v
        rows = tab.T[tab.L[sub]]
        acc = rows if acc is None else acc ^ rows
    return acc


def xor_rows_from_tables(target: BitMatrix, r_start: int, r_end: int, v: np.ndarray,
                         k: int, tables, mask: np.ndarray | None = None):
    """Add the table rows selected by ``v`` into rows ``r_start..r_end-1`` of ``target``."""
    if r_end <= r_start:
        return
    tabs = _as_list(tables)
    rows = lookup_sum(tabs, v, k)
    if mask is not None:
        rows &= mask
    w0 = tabs[0].word_offset
    target.data[r_start:r_end, w0:w0 + rows.shape[1]] ^= rows
    row_ops.add((r_end - r_start) * len(tabs))


def add_rows_from_table(A: BitMatrix, r_start: int, r_end: int, c_start: int, k: int,
                        tables):
    """For each row ``i`` in ``[r_start, r_end)`` add ``T[L[v]]`` where ``v`` is
    the ``k``-bit value of ``A[i, c_start:c_start+k]``.

    ``tables`` is a single :class:`GrayTables` or the list produced by
    :func:`make_tables`.
    """
    if r_end <= r_start:
        return
    v = A.read_bits_rows(r_start, r_end, c_start, k)
    xor_rows_from_tables(A, r_start, r_end, v, k, tables)


def make_multiplier_table(patterns: Sequence[int], k: int) -> np.ndarray:
    """Map each ``k``-bit pattern back to the combination producing it.

    ``patterns[t]`` is the index pattern (most significant bit first) of
    source row ``t``. The result ``M`` satisfies
    ``pattern(M[v]) == v``: it evaluates ``v -> v * E^-1`` where ``E`` is the
    ``k x k`` block whose rows are the patterns.
    """
    _check_k(k)
    pat = np.zeros(1 << k, dtype=np.int64)
    for i in range(k):
        h = 1 << i
        pat[h:2 * h] = pat[h - 1::-1] ^ int(patterns[k - 1 - i])
    M = np.full(1 << k, -1, dtype=np.int64)
    M[pat] = gray_sequence(k)
    if (M < 0).any():
        raise ValueError("pattern block is singular; no multiplier table exists")
    return M


def postprocess_tables(tables, k: int, col: int):
    """XOR each entry's combination vector into columns ``[col, col+k)``.

    After this, adding ``T[L[u]]`` to a row whose index bits equal the
    pattern of ``u`` leaves ``u`` itself in those columns (the multipliers
    of the eliminated row) instead of zeros.
    """
    for tab in _as_list(tables):
        kj = tab.k
        comb = gray_sequence(kj)  # combination held by storage row p
        # place MSB-first chunk value at columns col+offset .. col+offset+kj-1
        lsb = bit_reverse_table(kj)[comb].astype(np.uint64)
        c = col + tab.offset
        q, sh = divmod(c, WORD_BITS)
        wq = q - tab.word_offset
        tab.T[:, wq] ^= lsb << np.uint64(sh)
        if sh + kj > WORD_BITS:
            tab.T[:, wq + 1] ^= lsb >> np.uint64(WORD_BITS - sh)
    return tables


def column_mask(tables, lo: int, hi: int) -> np.ndarray:
    """Word mask (aligned like ``tables``) keeping columns ``[lo, hi)``."""
    tab = _as_list(tables)[0]
    nw = tab.T.shape[1]
    w0 = tab.word_offset
    keep = prefix_masks([hi], w0 + nw)[0] & ~prefix_masks([lo], w0 + nw)[0]
    return keep[w0:]
