"""Tests for the dense linear-algebra kernel."""

import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import DimensionError, NonFiniteError, SingularMatrixError
from src.linalg import (
    inverse,
    log_abs_det,
    lu_decompose,
    lu_inverse,
    lu_solve,
    matmul,
    matrix_exponential,
    numerical_rank,
)


def _cofactor_det(a: np.ndarray) -> float:
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1) ** j * a[0, j] * _cofactor_det(minor)
    return total


def test_matmul_shapes():
    """matmul rejects non-conformant operands."""
    print("\n=== Testing matmul ===")
    a = np.arange(6.0).reshape(2, 3)
    b = np.ones((3, 4))
    assert matmul(a, b).shape == (2, 4)
    with pytest.raises(DimensionError):
        matmul(a, a)
    print("[PASS] matmul")


def test_lu_reconstructs_permuted_input():
    print("\n=== Testing LU factors ===")
    rng = np.random.default_rng(0)
    for d in (1, 2, 5, 9):
        a = rng.normal(size=(d, d))
        f = lu_decompose(a)
        assert np.allclose(a[f.perm], f.lower @ f.upper, atol=1e-12)
        assert np.allclose(np.diag(f.lower), 1.0)
        assert f.sign in (1, -1)
    print("[PASS] LU factors")


def test_log_abs_det_matches_cofactor_expansion():
    print("\n=== Testing log|det| against cofactors ===")
    rng = np.random.default_rng(1)
    for d in range(1, 7):
        for _ in range(5):
            a = rng.normal(size=(d, d))
            expected = np.log(abs(_cofactor_det(a)))
            assert abs(log_abs_det(a) - expected) <= 1e-9
    print("[PASS] log|det| oracle")


def test_log_abs_det_identity_and_diagonal():
    assert log_abs_det(np.eye(4)) == 0.0
    assert np.isclose(log_abs_det(np.diag([2.0, -3.0, 0.5])), np.log(3.0))


def test_singular_matrix_reports_pivot():
    print("\n=== Testing singular input ===")
    with pytest.raises(SingularMatrixError) as info:
        lu_decompose(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert info.value.pivot_index == 1
    with pytest.raises(SingularMatrixError):
        log_abs_det(np.zeros((3, 3)))
    print("[PASS] singular input")


def test_non_finite_input_rejected():
    with pytest.raises(NonFiniteError):
        lu_decompose(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(NonFiniteError):
        matrix_exponential(np.array([[np.inf]]))


def test_lu_solve_plain_and_transposed():
    print("\n=== Testing LU solves ===")
    rng = np.random.default_rng(2)
    a = rng.normal(size=(6, 6)) + 3.0 * np.eye(6)
    b = rng.normal(size=(6, 3))
    f = lu_decompose(a)
    assert np.allclose(a @ lu_solve(f, b), b, atol=1e-10)
    assert np.allclose(a.T @ lu_solve(f, b, transpose=True), b, atol=1e-10)
    with pytest.raises(DimensionError):
        lu_solve(f, np.ones((5, 1)))
    print("[PASS] LU solves")


def test_inverse():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(5, 5)) + 2.0 * np.eye(5)
    assert np.allclose(inverse(a) @ a, np.eye(5), atol=1e-10)


def test_lu_inverse_undoes_row_pivoting():
    print("\n=== Testing LU inverse ===")
    # zero leading entry forces a row swap
    a = np.array([[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]])
    f = lu_decompose(a)
    assert not np.array_equal(f.perm, np.arange(3))
    assert np.allclose(lu_inverse(f) @ a, np.eye(3), atol=1e-12)
    rng = np.random.default_rng(4)
    b = rng.normal(size=(20, 20)) + 2.0 * np.eye(20)
    f = lu_decompose(b)
    assert np.allclose(lu_inverse(f), np.linalg.inv(b), atol=1e-8)
    assert np.allclose(lu_inverse(f).T, lu_solve(f, np.eye(20), transpose=True), atol=1e-8)
    print("[PASS] LU inverse")


def test_matrix_exponential_known_values():
    print("\n=== Testing expm ===")
    assert np.allclose(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(matrix_exponential(np.diag([1.0, 2.0])), np.diag([np.e, np.e ** 2]), rtol=1e-13)
    nilpotent = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(matrix_exponential(nilpotent), [[1.0, 1.0], [0.0, 1.0]])

    # e^A e^-A = I even after several squarings
    rng = np.random.default_rng(4)
    a = rng.normal(size=(5, 5)) * 2.0
    product = matrix_exponential(a) @ matrix_exponential(-a)
    assert np.allclose(product, np.eye(5), atol=1e-8)
    print("[PASS] expm")


def test_numerical_rank():
    rng = np.random.default_rng(5)
    u = rng.normal(size=(6, 2))
    v = rng.normal(size=(6, 2))
    assert numerical_rank(u @ v.T) == 2
    assert numerical_rank(np.eye(4)) == 4
    assert numerical_rank(np.zeros((3, 3))) == 0


def main():
    print("=" * 60)
    print("Linear algebra tests")
    print("=" * 60)
    test_matmul_shapes()
    test_lu_reconstructs_permuted_input()
    test_log_abs_det_matches_cofactor_expansion()
    test_log_abs_det_identity_and_diagonal()
    test_singular_matrix_reports_pivot()
    test_non_finite_input_rejected()
    test_lu_solve_plain_and_transposed()
    test_inverse()
    test_lu_inverse_undoes_row_pivoting()
    test_matrix_exponential_known_values()
    test_numerical_rank()
    print("\nALL LINEAR ALGEBRA TESTS PASSED")


if __name__ == "__main__":
    main()
