"""scikit-learn style wrappers around the elimination routines."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bitmat import BitMatrix
from .gf2mul import mul_m4rm
from .graycode import DEFAULT_TABLES
from .ple import STRATEGIES, decompose, echelonize, ple_factors
from .validation import check_gf2_array, check_gf2_matrix, check_n_features


def _leading_columns(R: np.ndarray) -> np.ndarray:
    nz = R.any(axis=1)
    return np.argmax(R[nz] != 0, axis=1)


class GF2Echelon(TransformerMixin, BaseEstimator):
    """Row space of a GF(2) matrix in reduced row echelon form.

    ``fit`` echelonizes the training matrix. ``transform`` reduces each row
    of ``X`` modulo the fitted row space, so rows inside that space map to
    zero.

    Attributes
    ----------
    components_ : ndarray of shape (rank_, n_features)
        Nonzero rows of the RREF.
    pivots_ : ndarray of shape (rank_,)
        Column of each leading one (the column rank profile).
    rank_ : int
    """

    def __init__(self, strategy: str = "ple-recursive", k: int | None = None,
                 tables: int = DEFAULT_TABLES):
        self.strategy = strategy
        self.k = k
        self.tables = tables

    def fit(self, X, y=None):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        A = check_gf2_matrix(X)
        rank = echelonize(A, self.strategy, True, k=self.k, tables=self.tables)
        R = A.to_array()[:rank]
        self.components_ = R
        self.pivots_ = _leading_columns(R)
        self.rank_ = rank
        self.n_features_in_ = A.ncols
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        a = check_gf2_array(X)
        check_n_features(a, self.n_features_in_)
        if self.rank_ == 0 or a.shape[0] == 0:
            return a.copy()
        coeffs = BitMatrix.from_array(a[:, self.pivots_])
        out = BitMatrix.from_array(a)
        out ^= mul_m4rm(coeffs, BitMatrix.from_array(self.components_))
        return out.to_array()

    def contains(self, X) -> np.ndarray:
        """Boolean mask of the rows of ``X`` lying in the fitted row space."""
        return ~self.transform(X).any(axis=1)


class PLEDecomposition(BaseEstimator):
    """Factor ``A = P^T L E`` and keep the factors as dense 0/1 arrays.

    Attributes
    ----------
    P_ : ndarray of int
        Swap vector; row ``i`` was exchanged with row ``P_[i]``.
    perm_ : ndarray of int
        Row ``i`` of ``L_ @ E_`` equals row ``perm_[i]`` of the input.
    L_ : ndarray of shape (n_rows, rank_)
    E_ : ndarray of shape (rank_, n_features)
    Q_ : ndarray of shape (rank_,)
        Pivot columns (column rank profile).
    """

    def __init__(self, strategy: str = "ple-recursive", k: int | None = None,
                 tables: int = DEFAULT_TABLES, crossover: int | None = None):
        self.strategy = strategy
        self.k = k
        self.tables = tables
        self.crossover = crossover

    def fit(self, X, y=None):
        A = check_gf2_matrix(X)
        out = decompose(A, self.strategy, k=self.k, tables=self.tables,
                        crossover=self.crossover)
        L, E = ple_factors(A, out)
        self.P_ = np.asarray(out.P.swaps, dtype=np.int64)
        self.perm_ = out.P.as_array()
        self.L_ = L.to_array()
        self.E_ = E.to_array()
        self.Q_ = np.asarray(out.Q, dtype=np.int64)
        self.rank_ = out.rank
        self.n_features_in_ = A.ncols
        return self

    def reconstruct(self) -> np.ndarray:
        """Recompute the fitted matrix from its factors."""
        check_is_fitted(self, "E_")
        LE = (self.L_.astype(np.int64) @ self.E_.astype(np.int64)) % 2
        A = np.empty_like(LE, dtype=np.uint8)
        A[self.perm_] = LE
        return A
