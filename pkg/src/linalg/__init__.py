"""Dense linear algebra kernel."""

from src.linalg.core import (
    PIVOT_TOL,
    LUFactors,
    as_matrix,
    inverse,
    log_abs_det,
    lu_decompose,
    lu_inverse,
    lu_solve,
    matmul,
    matrix_exponential,
    numerical_rank,
)

__all__ = [
    "PIVOT_TOL",
    "LUFactors",
    "as_matrix",
    "inverse",
    "log_abs_det",
    "lu_decompose",
    "lu_inverse",
    "lu_solve",
    "matmul",
    "matrix_exponential",
    "numerical_rank",
]
