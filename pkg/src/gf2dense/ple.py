"""PLE decomposition over GF(2) and echelon forms derived from it.

Every routine overwrites its input with the space-shared ``L\\E`` layout:

* ``L`` (unit lower triangular, ``s x r``) lives strictly below the diagonal
  in columns ``0 .. r-1``; its unit diagonal is implicit.
* Row ``i < r`` of ``E`` has its pivot at column ``Q[i]``. The stored row keeps
  a 1 on the diagonal ``(i, i)`` for that pivot and a 0 at ``(i, Q[i])`` when
  ``Q[i] != i``; all entries right of ``Q[i]`` are stored in place.
  :func:`ple_factors` undoes this bookkeeping.

``P`` is a LAPACK-style swap vector: ``A = P^T (L E)`` where ``P^T`` undoes
the swaps ``i <-> P[i]`` in descending order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitmat import (BitMatrix, RowPermutation, as_matrix, last_word_mask, prefix_masks,
                     reverse_bits, row_ops)
from .gf2mul import MulConfig, addmul, mul_naive, trsm_lower_left_unit, trsm_upper_left_unit
from .graycode import (DEFAULT_TABLES, column_mask, default_k, effective_table_count,
                       make_multiplier_table, make_tables, postprocess_tables,
                       xor_rows_from_tables)

DEFAULT_BUDGET_BYTES = 256 * 1024
STRATEGIES = ("m4ri", "ple-iterative", "ple-recursive", "naive")


@dataclass
class PleOutcome:
    """Result of a PLE decomposition.

    ``s`` is the number of leading rows that were decomposed. It equals the
    row count except for the lazy partial routine, which may stop early.
    """

    rank: int
    P: RowPermutation
    Q: list = field(default_factory=list)
    s: int = 0


# -- lazy partial decomposition on integer rows -----------------------------------


def _swap_bits(x, a, b):
    if ((x >> a) ^ (x >> b)) & 1:
        x ^= (1 << a) | (1 << b)
    return x


def _partial_rows(rows: list, n: int, complete: bool = False):
    """Lazy left-looking elimination on ``rows`` (bit ``j`` = column ``j``).

    Returns ``(r, P, Q, s)``; rows ``s`` and beyond are left untouched. When
    ``complete`` is set, or fewer than ``n`` pivots exist, ``s == len(rows)``.
    """
    m = len(rows)
    P, Q, s, tails = [], [], [], []
    r = c = 0
    adds = 0
    while r < m and c < n:
        found = False
        for j in range(c, n):
            for i in range(r, m):
                if r and i > s[r - 1]:
                    first = r - 1
                    while first > 0 and s[first - 1] < i:
                        first -= 1
                    x = rows[i]
                    for l in range(first, r):
                        if x >> Q[l] & 1:
                            x ^= tails[l]
                            adds += 1
                        s[l] = i
                    rows[i] = x
                if rows[i] >> j & 1:
                    found = True
                    break
            if found:
                break
        if not found:
            break
        P.append(i)
        Q.append(j)
        rows[r], rows[i] = rows[i], rows[r]
        s.append(i)
        tails.append(rows[r] >> (j + 1) << (j + 1))
        r += 1
        c = j + 1

    if r == 0:
        row_ops.add(adds)
        return 0, list(range(m)), [], m
    # a column without pivot before the first pivot leaves later rows stale
    smax = m - 1 if complete or r < n else max(s)
    for i in range(r, smax + 1):
        x = rows[i]
        for l in range(r):
            if s[l] < i and x >> Q[l] & 1:
                x ^= tails[l]
                adds += 1
        rows[i] = x
    row_ops.add(adds)
    stop = smax + 1
    for j in range(r):
        q = Q[j]
        if q != j:
            for i in range(j, stop):
                rows[i] = _swap_bits(rows[i], j, q)
    P.extend(range(r, stop))
    return r, P, Q, stop


def partial_ple(A, complete: bool = False) -> PleOutcome:
    """Lazy iterative PLE of the leading ``s`` rows of ``A`` (in place).

    The decomposition covers rows ``0 .. s-1`` where ``s`` is the furthest row
    the pivot search had to inspect; the remaining rows are left as they were.
    With ``complete=True`` every row is brought up to date, giving a full
    (cubic-cost) decomposition with ``s == nrows``.
    """
    M, back = as_matrix(A)
    rows = M.to_row_ints()
    r, P, Q, s = _partial_rows(rows, M.ncols, complete)
    M.set_row_ints(rows[:s])
    if back is not None:
        back.assign(M)
    return PleOutcome(r, RowPermutation(P), Q, s)


# -- block iterative decomposition ------------------------------------------------


def _solve_lower_rows(M: BitMatrix, r: int, lrows: list, start: int):
    """Apply ``L^-1`` (unit lower, bits in ``lrows``) to rows ``r..`` from ``start`` on."""
    if start >= M.ncols:
        return
    q, sh = divmod(start, 64)
    d = M.data
    lead = np.uint64(0xFFFF_FFFF_FFFF_FFFF) << np.uint64(sh)
    for i in range(1, len(lrows)):
        coeffs = lrows[i] & ((1 << i) - 1)
        if not coeffs:
            continue
        sel = [r + j for j in range(i) if coeffs >> j & 1]
        acc = np.bitwise_xor.reduce(d[sel, q:], axis=0)
        acc[0] &= lead
        d[r + i, q:] ^= acc
        row_ops.add(len(sel))


def _eliminate_stripe(M: BitMatrix, r: int, c: int, kk: int, rb: int, s: int,
                      stripe: list, tables: int):
    m, n = M.shape
    right = c + kk
    _solve_lower_rows(M, r, stripe[:rb], right)
    if (s == rb or right == n) and r + s == m:
        return
    # echelon rows of the stripe, multiplier bits cleared, as table sources
    src = BitMatrix(rb, n, M.data[r:r + rb].copy())
    src.data &= ~prefix_masks([c], src.stride)
    src.write_bits_lsb_rows(0, rb, c, kk, [stripe[t] >> t << t for t in range(rb)])
    tabs = make_tables(src, 0, c, rb, effective_table_count(rb, tables))
    if s > rb and right < n:
        v = M.read_bits_rows(r + rb, r + s, c, rb)
        xor_rows_from_tables(M, r + rb, r + s, v, rb, tabs, column_mask(tabs, right, n))
    if r + s < m:
        if rb != kk:
            raise AssertionError("partial decomposition stopped early on a rank-deficient stripe")
        patterns = [reverse_bits(stripe[t] >> t << t, kk) for t in range(kk)]
        mult = make_multiplier_table(patterns, kk)
        postprocess_tables(tabs, kk, c)
        v = M.read_bits_rows(r + s, m, c, kk)
        xor_rows_from_tables(M, r + s, m, mult[v], kk, tabs)


def block_iterative_ple(A, k: int | None = None,
                        tables: int = DEFAULT_TABLES) -> PleOutcome:
    """Stripe-by-stripe PLE with table-driven updates of the trailing matrix.

    Each ``k``-column stripe is decomposed with :func:`partial_ple`; the rows
    it did not reach and the columns to its right are then updated with one
    table lookup per row. ``k=None`` picks a width from the matrix size.
    """
    M, back = as_matrix(A)
    m, n = M.shape
    if k is None:
        k = default_k(max(2, min(m, n)))
    if not 1 <= k <= 16:
        raise ValueError(f"k must be in [1, 16], got {k}")
    P = list(range(m))
    Q = []
    r = c = 0
    while r < m and c < n:
        kk = min(k, n - c)
        stripe = M.read_bits_lsb_rows(r, m, c, kk).tolist()
        rb, Pb, Qb, s = _partial_rows(stripe, kk)
        for i in range(rb):
            Q.append(c + Qb[i])
            P[r + i] = r + Pb[i]
            if Pb[i] != i:
                M.swap_rows(r + i, r + Pb[i])
        M.write_bits_lsb_rows(r, r + s, c, kk, stripe[:s])
        if rb:
            _eliminate_stripe(M, r, c, kk, rb, s, stripe, tables)
            for i in range(rb):
                if r + i != c + i:
                    M.swap_cols_from_row(r + i, c + i, r + i)
        r += rb
        c += kk
    if back is not None:
        back.assign(M)
    return PleOutcome(r, RowPermutation(P), Q, m)


# -- block recursive decomposition ---------------------------------------------------


@dataclass
class _RecursionParams:
    crossover: int | None
    budget_bytes: int
    base: str
    k: int | None
    tables: int
    mul_cfg: MulConfig


def _split_columns(n: int) -> int:
    half = n // 2
    aligned = half - half % 64
    return aligned if aligned > 0 else half


def _is_base(m: int, n: int, prm: _RecursionParams) -> bool:
    if n <= 64:
        return True
    if prm.crossover is not None:
        return n <= prm.crossover
    return m * ((n + 63) // 64) * 8 <= prm.budget_bytes


def _ple_rec(V, prm: _RecursionParams):
    m, n = V.shape
    if m == 0 or n == 0:
        return 0, list(range(m)), []
    if _is_base(m, n, prm):
        sub = V.materialize()
        if prm.base == "cubic":
            out = partial_ple(sub, complete=True)
        else:
            out = block_iterative_ple(sub, prm.k, prm.tables)
        V.assign(sub)
        return out.rank, list(out.P.swaps), list(out.Q)

    n1 = _split_columns(n)
    r1, P1, Q1 = _ple_rec(V.view(0, 0, m, n1), prm)
    if r1:
        right = V.view(0, n1, m, n - n1)
        A1 = right.materialize()
        A1.apply_perm(P1)
        L00 = V.view(0, 0, r1, r1).materialize()
        top = A1.submatrix(0, 0, r1, A1.ncols)
        trsm_lower_left_unit(L00, top, prm.mul_cfg)
        A1.view(0, 0, r1, A1.ncols).assign(top)
        if r1 < m:
            A10 = V.view(r1, 0, m - r1, r1).materialize()
            low = A1.submatrix(r1, 0, m - r1, A1.ncols)
            addmul(low, A10, top, prm.mul_cfg)
            A1.view(r1, 0, m - r1, A1.ncols).assign(low)
        right.assign(A1)
    if r1 == m:
        return r1, P1[:r1], Q1
    r2, P2, Q2 = _ple_rec(V.view(r1, n1, m - r1, n - n1), prm)
    if r2 and r1:
        lower_left = V.view(r1, 0, m - r1, r1)
        A10 = lower_left.materialize()
        A10.apply_perm(P2)
        lower_left.assign(A10)
    P = P1[:r1] + [p + r1 for p in P2]
    Q = Q1 + [q + n1 for q in Q2]
    for i in range(r2):
        if r1 + i != n1 + i:
            V.swap_cols_from_row(r1 + i, n1 + i, r1 + i)
    return r1 + r2, P, Q


def recursive_ple(A, crossover: int | None = None, *, budget_bytes: int = DEFAULT_BUDGET_BYTES,
                  base: str = "iterative", k: int | None = None, tables: int = DEFAULT_TABLES,
                  mul_cfg: MulConfig | None = None) -> PleOutcome:
    """Column-splitting recursive PLE reducing the bulk of the work to products.

    Recursion stops once the column count is at most ``crossover`` or, when
    ``crossover`` is None, once the block occupies at most ``budget_bytes``.
    The base case is :func:`block_iterative_ple` (``base="iterative"``) or a
    full lazy elimination (``base="cubic"``).
    """
    if base not in ("iterative", "cubic"):
        raise ValueError(f"base must be 'iterative' or 'cubic', got {base!r}")
    if crossover is not None and crossover < 1:
        raise ValueError(f"crossover must be positive, got {crossover}")
    if budget_bytes < 1:
        raise ValueError(f"budget_bytes must be positive, got {budget_bytes}")
    M, back = as_matrix(A)
    prm = _RecursionParams(crossover, budget_bytes, base, k, tables, mul_cfg or MulConfig())
    r, P, Q = _ple_rec(M.view(), prm)
    P = P + list(range(len(P), M.nrows))
    if back is not None:
        back.assign(M)
    return PleOutcome(r, RowPermutation(P), Q, M.nrows)


# -- factors and echelon forms ---------------------------------------------------------


def ple_factors(A, outcome: PleOutcome) -> tuple[BitMatrix, BitMatrix]:
    """Unpack ``(L, E)`` from a matrix holding the ``L\\E`` layout.

    ``L`` is ``s x r`` unit lower triangular, ``E`` is ``r x n`` in echelon form.
    """
    M, _ = as_matrix(A)
    r, n = outcome.rank, M.ncols
    rows = outcome.s
    L = M.submatrix(0, 0, rows, r)
    if r:
        idx = np.arange(rows)
        L.data &= prefix_masks(np.minimum(idx, r), L.stride)
        d = np.arange(r)
        L.data[d, d >> 6] |= np.uint64(1) << (d & 63).astype(np.uint64)
    E = M.submatrix(0, 0, r, n)
    if r and n:
        E.data &= ~prefix_masks(np.arange(1, r + 1), E.stride)
        E.data[:, -1] &= last_word_mask(n)
        q = np.asarray(outcome.Q, dtype=np.int64)
        E.data[np.arange(r), q >> 6] |= np.uint64(1) << (q & 63).astype(np.uint64)
    return L, E


def reconstruct(A, outcome: PleOutcome) -> BitMatrix:
    """Rebuild the decomposed rows as ``P^T (L E)`` using the naive product."""
    L, E = ple_factors(A, outcome)
    LE = mul_naive(L, E)
    LE.apply_perm_inverse(outcome.P)
    return LE


def _check_profile(outcome: PleOutcome, n: int):
    Q = list(outcome.Q)
    if len(Q) != outcome.rank:
        raise ValueError(f"pivot list has {len(Q)} entries for rank {outcome.rank}")
    if any(b <= a for a, b in zip(Q, Q[1:])) or any(not 0 <= q < n for q in Q):
        raise ValueError("pivot columns must be strictly increasing and in range")


def ref_from_ple(A, outcome: PleOutcome) -> int:
    """Overwrite ``A`` with the echelon form ``E`` (zero rows below). Returns the rank."""
    M, back = as_matrix(A)
    _check_profile(outcome, M.ncols)
    _, E = ple_factors(M, outcome)
    M.data[:] = 0
    M.data[:outcome.rank] = E.data
    if back is not None:
        back.assign(M)
    return outcome.rank


def rref_from_ple(A, outcome: PleOutcome, mul_cfg: MulConfig | None = None) -> int:
    """Overwrite ``A`` with its reduced row echelon form. Returns the rank.

    The pivot columns of ``E`` form a unit upper triangular block ``U``;
    ``U^-1 E`` clears every entry above a pivot.
    """
    M, back = as_matrix(A)
    _check_profile(outcome, M.ncols)
    _, E = ple_factors(M, outcome)
    r = outcome.rank
    if r:
        U = E.gather_cols(outcome.Q)
        trsm_upper_left_unit(U, E, mul_cfg)
    M.data[:] = 0
    M.data[:r] = E.data
    if back is not None:
        back.assign(M)
    return r


def decompose(A, strategy: str = "ple-recursive", *, k: int | None = None,
              tables: int = DEFAULT_TABLES, crossover: int | None = None,
              budget_bytes: int = DEFAULT_BUDGET_BYTES,
              mul_cfg: MulConfig | None = None) -> PleOutcome:
    """Run one of the full PLE routines in place."""
    if strategy == "ple-iterative":
        return block_iterative_ple(A, k, tables)
    if strategy == "ple-recursive":
        return recursive_ple(A, crossover, budget_bytes=budget_bytes, k=k, tables=tables,
                             mul_cfg=mul_cfg)
    if strategy == "ple-cubic":
        return partial_ple(A, complete=True)
    raise ValueError(f"unknown PLE strategy {strategy!r}")


def echelonize(A, strategy: str = "ple-recursive", full: bool = True, *,
               k: int | None = None, tables: int = DEFAULT_TABLES,
               crossover: int | None = None, budget_bytes: int = DEFAULT_BUDGET_BYTES,
               mul_cfg: MulConfig | None = None) -> int:
    """Reduce ``A`` in place to RREF (``full=True``) or row echelon form.

    Returns the rank. ``strategy`` is one of ``m4ri``, ``ple-iterative``,
    ``ple-recursive`` or ``naive``.
    """
    if strategy == "m4ri":
        from .m4ri import m4ri_echelonize
        return m4ri_echelonize(A, k=k or 0, full=full)
    if strategy == "naive":
        from .reference import naive_echelonize
        return naive_echelonize(A, full=full)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    out = decompose(A, strategy, k=k, tables=tables, crossover=crossover,
                    budget_bytes=budget_bytes, mul_cfg=mul_cfg)
    if full:
        return rref_from_ple(A, out, mul_cfg)
    return ref_from_ple(A, out)
