"""Dense real-matrix kernel: products, LU, log-determinant, solves, expm.

Matrices are 2-D float64 numpy arrays. Every function treats its inputs as
read-only and returns fresh arrays.
"""

from dataclasses import dataclass
import math

import numpy as np

from src.errors import DimensionError, NonFiniteError, SingularMatrixError

PIVOT_TOL = 1e-12

# Taylor core for expm: scale until ||A||_1 <= EXPM_SCALE_NORM, then sum
# EXPM_ORDER terms. Truncation error is below 1e-16 relative at this order.
EXPM_ORDER = 18
EXPM_SCALE_NORM = 0.5


def as_matrix(a) -> np.ndarray:
    """Return a as a 2-D float64 array (scalars become 1x1)."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"Expected a 2-D matrix, got shape {arr.shape}")
    return arr


def _require_square(a: np.ndarray, what: str = "matrix") -> int:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got {a.shape[0]}x{a.shape[1]}")
    return a.shape[0]


def matmul(a, b) -> np.ndarray:
    """Standard matrix product with a shape check."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"Cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


@dataclass(frozen=True)
class LUFactors:
    """Partial-pivoting LU factors with P·A = L·U.

    combined holds the unit-lower L below the diagonal and U on and above
    it. Row i of P·A is row perm[i] of A.
    """
    combined: np.ndarray
    perm: np.ndarray
    sign: int

    @property
    def size(self) -> int:
        return self.combined.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return np.tril(self.combined, -1) + np.eye(self.size)

    @property
    def upper(self) -> np.ndarray:
        return np.triu(self.combined)

    @property
    def pivots(self) -> np.ndarray:
        return np.diag(self.combined).copy()


def lu_decompose(a) -> LUFactors:
    """Factor a square matrix with partial (row) pivoting.

    Raises:
        SingularMatrixError: If a pivot magnitude falls below PIVOT_TOL
    """
    lu = as_matrix(a).copy()
    n = _require_square(lu)
    if not np.all(np.isfinite(lu)):
        raise NonFiniteError("LU input contains non-finite entries")

    perm = np.arange(n)
    sign = 1
    for k in range(n):
        pivot_row = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = lu[pivot_row, k]
        if abs(pivot) < PIVOT_TOL:
            raise SingularMatrixError(
                f"Pivot {k} has magnitude {abs(pivot):.3e} < {PIVOT_TOL:g}",
                pivot_index=k,
            )
        if pivot_row != k:
            lu[[k, pivot_row]] = lu[[pivot_row, k]]
            perm[[k, pivot_row]] = perm[[pivot_row, k]]
            sign = -sign
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])

    lu.flags.writeable = False
    perm.flags.writeable = False
    return LUFactors(combined=lu, perm=perm, sign=sign)


def log_abs_det(a) -> float:
    """log|det(a)| as the sum of log pivot magnitudes."""
    factors = lu_decompose(a)
    return float(np.sum(np.log(np.abs(factors.pivots))))


def lu_solve(f: LUFactors, b, transpose: bool = False) -> np.ndarray:
    """Solve A·x = b (or Aᵀ·x = b) from the factors of A.

    b may hold several right-hand sides as columns.
    """
    b = as_matrix(b)
    n = f.size
    if b.shape[0] != n:
        raise DimensionError(f"Right-hand side has {b.shape[0]} rows, system has {n}")
    lu = f.combined

    if not transpose:
        # L·U·x = b[perm]
        x = b[f.perm].copy()
        for i in range(1, n):
            x[i] -= lu[i, :i] @ x[:i]
        for i in range(n - 1, -1, -1):
            x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
        return x

    # Aᵀ = Uᵀ·Lᵀ·P, so solve Uᵀ z = b, Lᵀ w = z, then x[perm] = w
    z = b.copy()
    for i in range(n):
        z[i] = (z[i] - lu[:i, i] @ z[:i]) / lu[i, i]
    for i in range(n - 2, -1, -1):
        z[i] -= lu[i + 1:, i] @ z[i + 1:]
    x = np.empty_like(z)
    x[f.perm] = z
    return x


def lu_inverse(f: LUFactors) -> np.ndarray:
    """A⁻¹ = U⁻¹·L⁻¹·P from the factors, one triangular inverse each.

    Pivots were checked against PIVOT_TOL when factoring, so both
    triangles are invertible.
    """
    inv = np.empty((f.size, f.size))
    inv[:, f.perm] = np.linalg.inv(f.upper) @ np.linalg.inv(f.lower)
    return inv


def inverse(a) -> np.ndarray:
    """Matrix inverse through the LU factors."""
    a = as_matrix(a)
    _require_square(a)
    return lu_inverse(lu_decompose(a))


def matrix_exponential(a) -> np.ndarray:
    """e^a by scaling and squaring around a truncated Taylor series."""
    a = as_matrix(a)
    n = _require_square(a)
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix_exponential input contains non-finite entries")

    norm = float(np.abs(a).sum(axis=0).max()) if n else 0.0
    squarings = 0
    if norm > EXPM_SCALE_NORM:
        squarings = int(math.ceil(math.log2(norm / EXPM_SCALE_NORM)))
    scaled = a / (2.0 ** squarings)

    result = np.eye(n)
    term = np.eye(n)
    for order in range(1, EXPM_ORDER + 1):
        term = term @ scaled / order
        result = result + term

    for _ in range(squarings):
        result = result @ result

    if not np.all(np.isfinite(result)):
        raise NonFiniteError(f"matrix_exponential overflowed (||a||_1 = {norm:.3e})")
    return result


def numerical_rank(a, tol: float = 1e-9) -> int:
    """Rank by Gaussian elimination with full pivoting."""
    m = as_matrix(a).copy()
    rows, cols = m.shape
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    rank = 0
    for _ in range(min(rows, cols)):
        sub = np.abs(m[rank:, rank:])
        if sub.size == 0:
            break
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= tol * scale:
            break
        i, j = i + rank, j + rank
        m[[rank, i]] = m[[i, rank]]
        m[:, [rank, j]] = m[:, [j, rank]]
        m[rank + 1:] -= np.outer(m[rank + 1:, rank] / m[rank, rank], m[rank])
        rank += 1
    return rank
