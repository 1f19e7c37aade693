"""Input checking for the array-facing API."""

from __future__ import annotations

import numpy as np

from .bitmat import BitMatrix, MatrixView


def check_gf2_array(X, *, allow_empty: bool = True) -> np.ndarray:
    """Return ``X`` as a 2-D uint8 array of zeros and ones.

    Accepts a :class:`BitMatrix`, a :class:`MatrixView`, or anything
    ``numpy.asarray`` understands. Boolean input is accepted; any other value
    outside ``{0, 1}`` raises ``ValueError``.
    """
    if isinstance(X, (BitMatrix, MatrixView)):
        return X.to_array()
    a = np.asarray(X)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got {a.ndim} dimension(s)")
    if a.dtype == bool:
        a = a.astype(np.uint8)
    elif a.dtype.kind in "iuf":
        if a.size and not np.isin(a, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        a = a.astype(np.uint8)
    else:
        raise ValueError(f"unsupported dtype {a.dtype}")
    if not allow_empty and 0 in a.shape:
        raise ValueError(f"empty array of shape {a.shape}")
    return a


def check_gf2_matrix(X) -> BitMatrix:
    """Fresh :class:`BitMatrix` holding ``X``; the input is never aliased."""
    if isinstance(X, BitMatrix):
        return X.copy()
    if isinstance(X, MatrixView):
        return X.materialize()
    return BitMatrix.from_array(check_gf2_array(X))


def check_n_features(X: np.ndarray, expected: int):
    if X.shape[1] != expected:
        raise ValueError(f"X has {X.shape[1]} columns; the estimator was fitted with {expected}")
