"""Word-packed dense matrices over GF(2).

Rows are stored contiguously (row-major) as arrays of 64-bit words. Column
``j`` of a row lives in word ``j // 64`` at bit position ``j % 64`` (least
significant bit first). Bits beyond the last column of a row are always zero.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

WORD_BITS = 64
ONES = np.uint64(0xFFFF_FFFF_FFFF_FFFF)
_U64 = np.dtype("<u8")

GF2B_MAGIC = b"GF2B\x01"


class RowOpCounter:
    """Counts vector (row) additions performed by the kernels."""

    def __init__(self):
        self.count = 0

    def add(self, n=1):
        self.count += n

    def reset(self):
        self.count = 0


row_ops = RowOpCounter()


def words_for(ncols: int) -> int:
    return (ncols + WORD_BITS - 1) // WORD_BITS


def last_word_mask(ncols: int) -> np.uint64:
    rem = ncols % WORD_BITS
    if rem == 0:
        return ONES
    return np.uint64((1 << rem) - 1)


def prefix_masks(lengths, nwords: int) -> np.ndarray:
    """Per-row word masks selecting columns ``[0, lengths[i])``."""
    lengths = np.asarray(lengths, dtype=np.int64).reshape(-1, 1)
    starts = np.arange(nwords, dtype=np.int64) * WORD_BITS
    bits = np.clip(lengths - starts, 0, WORD_BITS).astype(np.uint64)
    full = bits == WORD_BITS
    partial = (np.uint64(1) << np.where(full, np.uint64(0), bits)) - np.uint64(1)
    return np.where(full, ONES, partial)


def range_mask(lo: int, hi: int, word_lo: int, word_hi: int) -> np.ndarray:
    """Masks for words ``word_lo..word_hi-1`` selecting columns ``[lo, hi)``."""
    a = prefix_masks([hi], word_hi)[0] & ~prefix_masks([lo], word_hi)[0]
    return a[word_lo:word_hi]


def _bit_reverse_table(k: int) -> np.ndarray:
    v = np.arange(1 << k, dtype=np.int64)
    out = np.zeros_like(v)
    for t in range(k):
        out |= ((v >> t) & 1) << (k - 1 - t)
    return out


_REV_CACHE: dict = {}


def bit_reverse_table(k: int) -> np.ndarray:
    """Lookup table reversing the low ``k`` bits of every value ``< 2**k``."""
    tab = _REV_CACHE.get(k)
    if tab is None:
        tab = _REV_CACHE[k] = _bit_reverse_table(k)
    return tab


def reverse_bits(x: int, k: int) -> int:
    return int(format(x, f"0{k}b")[::-1], 2) if k else 0


def _extract_words(data: np.ndarray, c0: int, width: int) -> np.ndarray:
    """Copy columns ``[c0, c0+width)`` of every row of ``data``, realigned to bit 0."""
    nw = words_for(width)
    out = np.zeros((data.shape[0], nw), dtype=np.uint64)
    if nw == 0 or data.shape[0] == 0:
        return out
    q, sh = divmod(c0, WORD_BITS)
    lo = data[:, q:q + nw]
    if sh == 0:
        out[:, :lo.shape[1]] = lo
    else:
        out[:, :lo.shape[1]] = lo >> np.uint64(sh)
        hi = data[:, q + 1:q + nw + 1]
        out[:, :hi.shape[1]] |= hi << np.uint64(WORD_BITS - sh)
    out[:, -1] &= last_word_mask(width)
    return out


def _insert_words(data: np.ndarray, c0: int, width: int, src: np.ndarray, xor=False):
    """Write (or XOR) aligned words ``src`` into columns ``[c0, c0+width)`` of ``data``."""
    if width == 0 or data.shape[0] == 0:
        return
    q, sh = divmod(c0, WORD_BITS)
    q_end = (c0 + width - 1) // WORD_BITS + 1
    span = q_end - q
    nw = src.shape[1]
    if sh == 0:
        shifted = np.zeros((src.shape[0], span), dtype=np.uint64)
        shifted[:, :nw] = src[:, :span]
    else:
        shifted = np.zeros((src.shape[0], span), dtype=np.uint64)
        shifted[:, :min(nw, span)] = src[:, :min(nw, span)] << np.uint64(sh)
        upper = src >> np.uint64(WORD_BITS - sh)
        cnt = min(nw, span - 1)
        if cnt > 0:
            shifted[:, 1:1 + cnt] |= upper[:, :cnt]
    mask = range_mask(c0, c0 + width, q, q_end)
    region = data[:, q:q_end]
    if xor:
        region ^= shifted & mask
    else:
        region &= ~mask
        region |= shifted & mask


class BitMatrix:
    """Dense ``nrows x ncols`` matrix over GF(2), bit-packed row-major.

    Parameters
    ----------
    nrows, ncols : int
        Matrix dimensions.
    data : ndarray of uint64, optional
        Backing words, shape ``(nrows, words_for(ncols))``. A zero matrix is
        allocated when omitted.
    """

    __slots__ = ("nrows", "ncols", "stride", "data")

    def __init__(self, nrows: int, ncols: int, data: np.ndarray | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError(f"dimensions must be non-negative, got {nrows}x{ncols}")
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.stride = words_for(self.ncols)
        if data is None:
            try:
                data = np.zeros((self.nrows, self.stride), dtype=np.uint64)
            except (MemoryError, ValueError) as exc:
                raise MemoryError(
                    f"cannot allocate a {nrows}x{ncols} matrix over GF(2)") from exc
        elif data.shape != (self.nrows, self.stride) or data.dtype != np.uint64:
            raise ValueError(
                f"data must have shape {(self.nrows, self.stride)} and dtype uint64")
        self.data = data

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int, ncols: int | None = None) -> "BitMatrix":
        A = cls(n, n if ncols is None else ncols)
        d = np.arange(min(n, A.ncols))
        A.data[d, d >> 6] = np.uint64(1) << (d & 63).astype(np.uint64)
        return A

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        """Pack a 2-D array of zeros and ones."""
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        m, n = a.shape
        A = cls(m, n)
        if m and n:
            packed = np.packbits(a.astype(bool), axis=1, bitorder="little")
            buf = np.zeros((m, A.stride * 8), dtype=np.uint8)
            buf[:, :packed.shape[1]] = packed
            A.data[:] = buf.view(_U64)
        return A

    @classmethod
    def from_row_ints(cls, rows: Sequence[int], ncols: int) -> "BitMatrix":
        A = cls(len(rows), ncols)
        A.set_row_ints(rows)
        return A

    def to_array(self) -> np.ndarray:
        """Unpack into an ``(nrows, ncols)`` uint8 array."""
        if self.nrows == 0 or self.ncols == 0:
            return np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        raw = self.data.astype(_U64, copy=False).view(np.uint8)
        return np.unpackbits(raw, axis=1, bitorder="little")[:, :self.ncols]

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.nrows, self.ncols, self.data.copy())

    def to_row_ints(self) -> list[int]:
        """Rows as Python integers; bit ``j`` of row ``i`` is entry ``(i, j)``."""
        if self.stride == 0:
            return [0] * self.nrows
        raw = self.data.astype(_U64, copy=False).tobytes()
        step = 8 * self.stride
        fb = int.from_bytes
        return [fb(raw[o:o + step], "little") for o in range(0, len(raw), step)]

    def set_row_ints(self, rows: Sequence[int], start: int = 0):
        if self.stride == 0 or not len(rows):
            return
        step = 8 * self.stride
        buf = b"".join(v.to_bytes(step, "little") for v in rows)
        block = np.frombuffer(buf, dtype=_U64).reshape(len(rows), self.stride)
        self.data[start:start + len(rows)] = block
        self.data[start:start + len(rows), -1] &= last_word_mask(self.ncols)

    def row_int(self, i: int) -> int:
        self._check_row(i)
        return int.from_bytes(self.data[i].astype(_U64, copy=False).tobytes(), "little")

    # -- comparisons and arithmetic ----------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        row_ops.add(self.nrows)
        return BitMatrix(self.nrows, self.ncols, self.data ^ other.data)

    __add__ = __xor__

    def __ixor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        row_ops.add(self.nrows)
        self.data ^= other.data
        return self

    def __repr__(self):
        if self.nrows * self.ncols <= 400:
            body = "\n".join("".join(map(str, r)) for r in self.to_array())
            return f"BitMatrix({self.nrows}x{self.ncols})\n{body}"
        return f"BitMatrix({self.nrows}x{self.ncols})"

    def is_zero(self) -> bool:
        return not self.data.any()

    def rank_hint_rows(self) -> int:
        """Number of non-zero rows."""
        return int(self.data.any(axis=1).sum())

    def padding_ok(self) -> bool:
        """True when every bit beyond the last column is zero."""
        if self.stride == 0 or self.nrows == 0:
            return True
        return not (self.data[:, -1] & ~last_word_mask(self.ncols)).any()

    # -- element access -----------------------------------------------------

    def _check_row(self, i):
        if not 0 <= i < self.nrows:
            raise IndexError(f"row {i} out of range for {self.nrows} rows")

    def _check_col(self, j):
        if not 0 <= j < self.ncols:
            raise IndexError(f"column {j} out of range for {self.ncols} columns")

    def get(self, i: int, j: int) -> int:
        self._check_row(i)
        self._check_col(j)
        return int(self.data[i, j >> 6] >> np.uint64(j & 63)) & 1

    def set(self, i: int, j: int, value: int):
        self._check_row(i)
        self._check_col(j)
        bit = np.uint64(1) << np.uint64(j & 63)
        if value & 1:
            self.data[i, j >> 6] |= bit
        else:
            self.data[i, j >> 6] &= ~bit

    def __getitem__(self, ij):
        return self.get(*ij)

    def __setitem__(self, ij, value):
        self.set(ij[0], ij[1], value)

    def read_bits(self, i: int, c: int, k: int) -> int:
        """Integer whose ``t``-th most significant of ``k`` bits is ``A[i, c+t]``.

        ``[0, 1, 1]`` read from column ``c`` with ``k=3`` gives 3.
        """
        self._check_row(i)
        if not 0 <= k <= WORD_BITS:
            raise ValueError(f"k must be in [0, 64], got {k}")
        if c < 0 or c + k > self.ncols:
            raise IndexError(f"columns [{c}, {c + k}) out of range for {self.ncols} columns")
        if k == 0:
            return 0
        return reverse_bits(self._read_lsb(i, c, k), k)

    def _read_lsb(self, i, c, k):
        q, sh = divmod(c, WORD_BITS)
        x = int(self.data[i, q]) >> sh
        if sh + k > WORD_BITS:
            x |= int(self.data[i, q + 1]) << (WORD_BITS - sh)
        return x & ((1 << k) - 1)

    def read_bits_lsb_rows(self, r0: int, r1: int, c: int, k: int) -> np.ndarray:
        """Columns ``[c, c+k)`` of rows ``r0..r1-1`` as integers, column ``c`` in bit 0."""
        if k == 0 or r1 <= r0:
            return np.zeros(max(r1 - r0, 0), dtype=np.uint64)
        q, sh = divmod(c, WORD_BITS)
        x = self.data[r0:r1, q] >> np.uint64(sh)
        if sh + k > WORD_BITS:
            x = x | (self.data[r0:r1, q + 1] << np.uint64(WORD_BITS - sh))
        if k < WORD_BITS:
            x = x & np.uint64((1 << k) - 1)
        return x

    def read_bits_rows(self, r0: int, r1: int, c: int, k: int) -> np.ndarray:
        """Vectorised :meth:`read_bits` over rows ``r0..r1-1`` (``k <= 16``)."""
        x = self.read_bits_lsb_rows(r0, r1, c, k).astype(np.int64)
        return bit_reverse_table(k)[x]

    def write_bits_lsb_rows(self, r0: int, r1: int, c: int, k: int, values):
        """Overwrite columns ``[c, c+k)`` of rows ``r0..r1-1`` (inverse of the LSB read)."""
        if k == 0 or r1 <= r0:
            return
        vals = np.asarray(values, dtype=np.uint64).reshape(-1, 1)
        _insert_words(self.data[r0:r1], c, k, vals)

    # -- row and column primitives -----------------------------------------

    def row_add_from(self, dst: int, src: int, start_col: int = 0):
        """Add row ``src`` into row ``dst`` on columns ``start_col`` and beyond."""
        self._check_row(dst)
        self._check_row(src)
        if dst == src:
            raise ValueError("cannot add a row to itself")
        if not 0 <= start_col < max(self.ncols, 1):
            raise IndexError(f"start column {start_col} out of range")
        q, sh = divmod(start_col, WORD_BITS)
        d = self.data
        if sh:
            d[dst, q] ^= d[src, q] & (ONES << np.uint64(sh))
            d[dst, q + 1:] ^= d[src, q + 1:]
        else:
            d[dst, q:] ^= d[src, q:]
        row_ops.add()

    def swap_rows(self, i: int, j: int):
        self._check_row(i)
        self._check_row(j)
        if i != j:
            self.data[[i, j]] = self.data[[j, i]]

    def swap_cols(self, a: int, b: int):
        self.swap_cols_from_row(a, b, 0)

    def swap_cols_from_row(self, a: int, b: int, start_row: int):
        """Exchange columns ``a`` and ``b`` in rows ``start_row`` and below.

        Uses the masked shift-and-XOR swap: no per-row branches.
        """
        if not 0 <= start_row <= self.nrows:
            raise IndexError(f"start row {start_row} out of range")
        self.swap_cols_in_rows(a, b, start_row, self.nrows)

    def swap_cols_in_rows(self, a: int, b: int, r0: int, r1: int):
        self._check_col(a)
        self._check_col(b)
        if a == b or r1 <= r0:
            return
        # x holds the higher bit position within its word
        if (a & 63) < (b & 63):
            a, b = b, a
        xw, xb = divmod(a, WORD_BITS)
        yw, yb = divmod(b, WORD_BITS)
        delta = np.uint64(xb - yb)
        ym = np.uint64(1) << np.uint64(yb)
        xm = np.uint64(1) << np.uint64(xb)
        rows = self.data[r0:r1]
        if xw == yw:
            w = rows[:, xw]
            t = ((w >> delta) ^ w) & ym
            rows[:, xw] = w ^ (t | (t << delta))
        else:
            X = rows[:, xw]
            Y = rows[:, yw]
            X ^= (Y & ym) << delta
            Y ^= (X & xm) >> delta
            X ^= (Y & ym) << delta
            rows[:, xw] = X
            rows[:, yw] = Y

    def apply_perm(self, P: "RowPermutation | Sequence[int]"):
        """Swap rows ``i <-> P[i]`` for ``i`` ascending."""
        P = as_permutation(P)
        P.validate(self.nrows)
        for i, p in enumerate(P.swaps):
            if p != i:
                self.data[[i, p]] = self.data[[p, i]]

    def apply_perm_inverse(self, P: "RowPermutation | Sequence[int]"):
        """Swap rows ``i <-> P[i]`` for ``i`` descending (undoes :meth:`apply_perm`)."""
        P = as_permutation(P)
        P.validate(self.nrows)
        for i in range(len(P.swaps) - 1, -1, -1):
            p = P.swaps[i]
            if p != i:
                self.data[[i, p]] = self.data[[p, i]]

    def gather_cols(self, cols: Sequence[int]) -> "BitMatrix":
        """New matrix made of the listed columns."""
        cols = np.asarray(cols, dtype=np.int64)
        if len(cols) == 0:
            return BitMatrix(self.nrows, 0)
        bits = (self.data[:, cols >> 6] >> (cols & 63).astype(np.uint64)) & np.uint64(1)
        return BitMatrix.from_array(bits.astype(np.uint8))

    # -- random fill ----------------------------------------------------------

    def randomize(self, density: float | None = None, nnz_per_row: int | None = None,
                  seed=None):
        """Fill with random bits.

        Either ``density`` (probability of a one, default 0.5) or
        ``nnz_per_row`` (exact number of distinct ones placed uniformly per
        row) may be given. Deterministic for a fixed ``seed``.
        """
        rng = np.random.default_rng(seed)
        m, n = self.shape
        if nnz_per_row is not None:
            if density is not None:
                raise ValueError("give either density or nnz_per_row, not both")
            if not 0 <= nnz_per_row <= n:
                raise ValueError(f"nnz_per_row must be in [0, {n}], got {nnz_per_row}")
            self.data[:] = 0
            if nnz_per_row == 0 or m == 0:
                return self
            rows = np.repeat(np.arange(m), nnz_per_row)
            cols = np.concatenate(
                [rng.choice(n, size=nnz_per_row, replace=False) for _ in range(m)])
            bits = np.uint64(1) << (cols & 63).astype(np.uint64)
            np.bitwise_or.at(self.data, (rows, cols >> 6), bits)
            return self
        if density is None:
            density = 0.5
        if not 0.0 <= density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {density}")
        if m == 0 or n == 0:
            return self
        if density == 0.0:
            self.data[:] = 0
        elif density == 1.0:
            self.data[:] = ONES
        elif density == 0.5:
            self.data[:] = rng.integers(0, np.iinfo(np.uint64).max, size=self.data.shape,
                                        dtype=np.uint64, endpoint=True)
        else:
            bits = rng.random((m, n)) < density
            self.data[:] = BitMatrix.from_array(bits).data
        self.data[:, -1] &= last_word_mask(n)
        return self

    # -- windows ----------------------------------------------------------------

    def view(self, row_off=0, col_off=0, nrows=None, ncols=None) -> "MatrixView":
        return MatrixView(self, row_off, col_off,
                          self.nrows - row_off if nrows is None else nrows,
                          self.ncols - col_off if ncols is None else ncols)

    def submatrix(self, row_off, col_off, nrows, ncols) -> "BitMatrix":
        return self.view(row_off, col_off, nrows, ncols).materialize()


def create(m: int, n: int) -> BitMatrix:
    """All-zero ``m x n`` matrix."""
    return BitMatrix(m, n)


def random_matrix(m, n, density=None, nnz_per_row=None, seed=None) -> BitMatrix:
    return BitMatrix(m, n).randomize(density=density, nnz_per_row=nnz_per_row, seed=seed)


@dataclass
class MatrixView:
    """Rectangular window into a :class:`BitMatrix`.

    Entry ``(i, j)`` of the view is entry ``(row_off + i, col_off + j)`` of
    ``base``. Column offsets need not be word aligned.
    """

    base: BitMatrix
    row_off: int
    col_off: int
    nrows: int
    ncols: int

    def __post_init__(self):
        if min(self.row_off, self.col_off, self.nrows, self.ncols) < 0:
            raise ValueError("view offsets and dimensions must be non-negative")
        if self.row_off + self.nrows > self.base.nrows:
            raise IndexError("view rows exceed the base matrix")
        if self.col_off + self.ncols > self.base.ncols:
            raise IndexError("view columns exceed the base matrix")

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def get(self, i, j):
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"({i}, {j}) outside a {self.nrows}x{self.ncols} view")
        return self.base.get(self.row_off + i, self.col_off + j)

    def set(self, i, j, value):
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"({i}, {j}) outside a {self.nrows}x{self.ncols} view")
        self.base.set(self.row_off + i, self.col_off + j, value)

    __getitem__ = lambda self, ij: self.get(*ij)  # noqa: E731

    def swap_cols_from_row(self, a, b, start_row):
        """Column swap restricted to view rows ``start_row .. nrows-1``."""
        if not (0 <= a < self.ncols and 0 <= b < self.ncols):
            raise IndexError(f"columns ({a}, {b}) outside the view")
        self.base.swap_cols_in_rows(self.col_off + a, self.col_off + b,
                                    self.row_off + start_row, self.row_off + self.nrows)

    def read_bits(self, i, c, k):
        if c < 0 or c + k > self.ncols:
            raise IndexError(f"columns [{c}, {c + k}) outside the view")
        return self.base.read_bits(self.row_off + i, self.col_off + c, k)

    def view(self, row_off=0, col_off=0, nrows=None, ncols=None) -> "MatrixView":
        nrows = self.nrows - row_off if nrows is None else nrows
        ncols = self.ncols - col_off if ncols is None else ncols
        if row_off + nrows > self.nrows or col_off + ncols > self.ncols:
            raise IndexError("nested view exceeds its parent")
        return MatrixView(self.base, self.row_off + row_off, self.col_off + col_off,
                          nrows, ncols)

    def materialize(self) -> BitMatrix:
        """Copy the window into a standalone, word-aligned matrix."""
        rows = self.base.data[self.row_off:self.row_off + self.nrows]
        words = _extract_words(rows, self.col_off, self.ncols)
        return BitMatrix(self.nrows, self.ncols, words)

    def assign(self, M: BitMatrix):
        """Overwrite the window with ``M`` (same shape)."""
        if M.shape != self.shape:
            raise ValueError(f"shape mismatch {M.shape} vs view {self.shape}")
        rows = self.base.data[self.row_off:self.row_off + self.nrows]
        _insert_words(rows, self.col_off, self.ncols, M.data)

    def xor_assign(self, M: BitMatrix):
        """Add ``M`` into the window."""
        if M.shape != self.shape:
            raise ValueError(f"shape mismatch {M.shape} vs view {self.shape}")
        rows = self.base.data[self.row_off:self.row_off + self.nrows]
        _insert_words(rows, self.col_off, self.ncols, M.data, xor=True)
        row_ops.add(self.nrows)

    def to_array(self) -> np.ndarray:
        return self.materialize().to_array()


def as_matrix(A) -> tuple[BitMatrix, MatrixView | None]:
    """Return a standalone matrix for ``A`` plus the view to write back to (if any)."""
    if isinstance(A, BitMatrix):
        return A, None
    if isinstance(A, MatrixView):
        if (A.row_off == 0 and A.col_off == 0 and A.nrows == A.base.nrows
                and A.ncols == A.base.ncols):
            return A.base, None
        return A.materialize(), A
    raise TypeError(f"expected BitMatrix or MatrixView, got {type(A).__name__}")


@dataclass
class RowPermutation:
    """LAPACK-style row permutation: row ``i`` is exchanged with row ``swaps[i]``.

    ``[0, 2, 2, 4, 4]`` encodes the swaps (1, 2) and (3, 4).
    """

    swaps: list[int] = field(default_factory=list)

    @classmethod
    def identity(cls, m: int) -> "RowPermutation":
        return cls(list(range(m)))

    def __len__(self):
        return len(self.swaps)

    def __getitem__(self, i):
        return self.swaps[i]

    def __iter__(self):
        return iter(self.swaps)

    def validate(self, nrows: int | None = None):
        for i, p in enumerate(self.swaps):
            if p < i:
                raise ValueError(f"malformed permutation: P[{i}] = {p} < {i}")
            if nrows is not None and p >= nrows:
                raise ValueError(f"malformed permutation: P[{i}] = {p} >= {nrows}")
        if nrows is not None and len(self.swaps) > nrows:
            raise ValueError(f"permutation of length {len(self.swaps)} exceeds {nrows} rows")

    def apply(self, A: BitMatrix):
        A.apply_perm(self)

    def apply_inverse(self, A: BitMatrix):
        A.apply_perm_inverse(self)

    def to_matrix(self, m: int | None = None) -> BitMatrix:
        """The permutation matrix obtained by applying the swaps to the identity."""
        M = BitMatrix.identity(len(self.swaps) if m is None else m)
        M.apply_perm(self)
        return M

    def as_array(self) -> np.ndarray:
        """Explicit image: ``perm[i]`` is the original row now at position ``i``."""
        perm = list(range(len(self.swaps)))
        for i, p in enumerate(self.swaps):
            perm[i], perm[p] = perm[p], perm[i]
        return np.asarray(perm, dtype=np.int64)


def as_permutation(P) -> RowPermutation:
    return P if isinstance(P, RowPermutation) else RowPermutation(list(P))


# -- file formats ----------------------------------------------------------------


def dumps_gf2b(A: BitMatrix) -> bytes:
    header = GF2B_MAGIC + struct.pack("<QQ", A.nrows, A.ncols)
    return header + A.data.astype(_U64, copy=False).tobytes()


def loads_gf2b(buf: bytes) -> BitMatrix:
    if buf[:5] != GF2B_MAGIC:
        raise ValueError("not a GF2B file (bad magic)")
    if len(buf) < 21:
        raise ValueError("truncated GF2B header")
    m, n = struct.unpack_from("<QQ", buf, 5)
    stride = words_for(n)
    body = buf[21:]
    if len(body) != 8 * m * stride:
        raise ValueError(f"GF2B payload has {len(body)} bytes, expected {8 * m * stride}")
    A = BitMatrix(m, n)
    if m and stride:
        A.data[:] = np.frombuffer(body, dtype=_U64).reshape(m, stride)
        if not A.padding_ok():
            raise ValueError("GF2B payload has non-zero padding bits")
    return A


def dumps_ascii(A: BitMatrix) -> str:
    lines = [f"{A.nrows} {A.ncols}"]
    chars = A.to_array() + np.uint8(ord("0"))
    lines.extend(row.tobytes().decode("ascii") for row in chars)
    return "\n".join(lines) + "\n"


def loads_ascii(text: str) -> BitMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or not lines[0]:
        raise ValueError("missing ASCII header line")
    try:
        m, n = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad ASCII header {lines[0]!r}") from exc
    if m < 0 or n < 0:
        raise ValueError(f"bad ASCII header {lines[0]!r}")
    body, rest = lines[1:1 + m], lines[1 + m:]
    if len(body) != m or any(rest):
        raise ValueError(f"expected {m} rows after the header")
    arr = np.zeros((m, n), dtype=np.uint8)
    for i, ln in enumerate(body):
        if len(ln) != n or set(ln) - {"0", "1"}:
            raise ValueError(f"row {i} is not {n} characters of 0/1")
        arr[i] = np.frombuffer(ln.encode(), dtype=np.uint8) - ord("0")
    return BitMatrix.from_array(arr)


def save(A: BitMatrix, path, fmt: str = "gf2b"):
    path = Path(path)
    if fmt == "gf2b":
        path.write_bytes(dumps_gf2b(A))
    elif fmt == "ascii":
        path.write_text(dumps_ascii(A))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def load(path) -> BitMatrix:
    """Read a matrix, detecting the format from the leading bytes."""
    buf = Path(path).read_bytes()
    if buf[:5] == GF2B_MAGIC:
        return loads_gf2b(buf)
    return loads_ascii(buf.decode("ascii"))


def stack_rows(blocks: Iterable[BitMatrix]) -> BitMatrix:
    blocks = list(blocks)
    n = blocks[0].ncols
    data = np.concatenate([b.data for b in blocks], axis=0)
    return BitMatrix(data.shape[0], n, data)
