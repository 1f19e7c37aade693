"""Dense linear algebra over GF(2): packed matrices, table-driven products,
PLE decomposition and echelon forms."""

from .bitmat import (BitMatrix, MatrixView, RowPermutation, create, load, random_matrix,
                     row_ops, save)
from .estimators import GF2Echelon, PLEDecomposition
from .gf2mul import MulConfig, addmul, mul_m4rm, mul_naive, mul_strassen, multiply
from .graycode import default_k, make_table, make_tables
from .m4ri import gauss_submatrix, m4ri_echelonize
from .ple import (PleOutcome, block_iterative_ple, echelonize, partial_ple, ple_factors,
                  reconstruct, recursive_ple, ref_from_ple, rref_from_ple)
from .reference import naive_rank, naive_rref

__version__ = "0.1.0"

__all__ = [
    "BitMatrix", "MatrixView", "RowPermutation", "create", "load", "random_matrix",
    "row_ops", "save", "MulConfig", "addmul", "mul_m4rm", "mul_naive", "mul_strassen",
    "multiply", "default_k", "make_table", "make_tables", "gauss_submatrix",
    "m4ri_echelonize", "PleOutcome", "block_iterative_ple", "echelonize", "partial_ple",
    "ple_factors", "reconstruct", "recursive_ple", "ref_from_ple", "rref_from_ple",
    "naive_rank", "naive_rref", "GF2Echelon", "PLEDecomposition",
]
