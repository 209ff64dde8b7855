"""Tests for the tape and its vector-Jacobian products."""

import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.autodiff import (
    Tape,
    backward,
    grad_check,
    record_acyclicity,
    record_column_scaling,
    record_elementwise,
    record_logabsdet,
    record_matmul,
    record_pairwise_diff,
    record_transpose,
    record_vstack,
)
from src.errors import DimensionError, InputError, LogDomainError, NonFiniteError
from src.model.acml import MaskConfig, MaskMode, PriorityVector, hard_mask_from, record_orientation_matrix
from src.model.dgpl import record_lagged, record_low_rank, record_masked
from src.model.objective import LossConfig, record_loss

TOL = 1e-6


def _sq(t, v):
    return record_elementwise(t, "frobenius_sq", v)


def test_matmul_and_transpose_gradients():
    print("\n=== Testing matmul / transpose VJPs ===")
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(3, 4)), rng.normal(size=(4, 2))
    assert grad_check(lambda t, v: _sq(t, record_matmul(t, v[0], v[1])), [a, b]) <= TOL
    assert grad_check(lambda t, v: _sq(t, record_matmul(t, v[0], record_transpose(t, v[1]))), [a, a * 0.5]) <= TOL
    print("[PASS] matmul / transpose")


def test_logabsdet_gradient():
    rng = np.random.default_rng(1)
    a = np.eye(4) + 0.3 * rng.normal(size=(4, 4))
    assert grad_check(lambda t, v: record_logabsdet(t, v[0]), [a]) <= TOL


def test_elementwise_gradients():
    print("\n=== Testing elementwise VJPs ===")
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))

    for kind in ("hadamard", "add", "sub"):
        assert grad_check(lambda t, v, k=kind: _sq(t, record_elementwise(t, k, v[0], v[1])), [a, b]) <= TOL

    assert grad_check(lambda t, v: _sq(t, record_elementwise(t, "scale", v[0], -2.5)), [a]) <= TOL
    assert grad_check(lambda t, v: record_elementwise(t, "l1_smooth", v[0]), [a]) <= TOL
    assert grad_check(lambda t, v: _sq(t, record_elementwise(t, "sigmoid", v[0])), [a]) <= TOL
    assert grad_check(
        lambda t, v: record_elementwise(t, "log_scalar", _sq(t, v[0])), [a]
    ) <= TOL
    print("[PASS] elementwise")


def test_structural_gradients():
    print("\n=== Testing pairwise / scaling / acyclicity / vstack VJPs ===")
    rng = np.random.default_rng(3)
    p = rng.normal(size=(4, 1))
    w = 0.5 * rng.normal(size=(4, 4))
    weights = rng.normal(size=(4, 4))

    def weighted(t, v):
        return _sq(t, record_elementwise(t, "hadamard", v, t.constant(weights)))

    assert grad_check(lambda t, v: weighted(t, record_pairwise_diff(t, v[0])), [p]) <= TOL
    assert grad_check(lambda t, v: weighted(t, record_column_scaling(t, v[0])), [w]) <= TOL
    assert grad_check(lambda t, v: record_acyclicity(t, v[0]), [w]) <= TOL
    assert grad_check(
        lambda t, v: _sq(t, record_matmul(t, record_vstack(t, [v[0], v[1]]), t.constant(weights))),
        [w[:2], w[2:]],
    ) <= TOL
    print("[PASS] structural")


def test_pairwise_diff_orientation():
    t = Tape()
    delta = record_pairwise_diff(t, t.leaf(np.array([[0.0], [1.0], [3.0]])))
    assert delta.value[0, 2] == 3.0
    assert delta.value[2, 0] == -3.0
    assert np.all(np.diag(delta.value) == 0.0)


def test_vstack_empty_is_zero_rows():
    t = Tape()
    stacked = record_vstack(t, [], cols=5)
    assert stacked.shape == (0, 5)


def test_gradmap_absent_and_constants():
    """Unused leaves read as zero; constants receive no adjoint."""
    t = Tape()
    used = t.leaf(np.ones((2, 2)))
    unused = t.leaf(np.ones((2, 2)))
    const = t.constant(np.full((2, 2), 3.0))
    root = _sq(t, record_elementwise(t, "hadamard", used, const))
    grads = backward(t, root)
    assert np.allclose(grads[used], 18.0)
    assert np.all(grads[unused] == 0.0)
    assert unused not in grads
    assert const not in grads


def test_backward_errors():
    t = Tape()
    a = t.leaf(np.ones((2, 2)))
    with pytest.raises(DimensionError):
        backward(t, a)

    t = Tape()
    huge = _sq(t, t.leaf(np.array([[1e200]])))
    with pytest.raises(NonFiniteError):
        backward(t, huge)


def test_log_scalar_domain():
    t = Tape()
    with pytest.raises(LogDomainError):
        record_elementwise(t, "log_scalar", t.leaf(np.array([[0.0]])))


def test_grad_check_eps_range():
    with pytest.raises(InputError):
        grad_check(lambda t, v: _sq(t, v[0]), [np.ones((1, 1))], eps=1.0)


def _full_loss(cfg: LossConfig, mask: MaskConfig):
    rng = np.random.default_rng(10)
    x = rng.normal(size=(20, 4))
    y = rng.normal(size=(20, 4))

    def f(t, v):
        e_so0, e_to0, e_so1, e_to1, priority = v
        w = record_low_rank(t, e_so0, e_to0)
        a = record_lagged(t, [record_low_rank(t, e_so1, e_to1)], 4)
        m = record_orientation_matrix(t, priority, mask, np.random.default_rng(7))
        w_eff = record_masked(t, w, m)
        return record_loss(t, t.constant(x), t.constant(y), w_eff, a, cfg).total

    return f


def test_full_loss_gradient_at_initialization():
    """d=4, k=2, p=1 with the stochastic mask: ≤ 1e-4 relative error."""
    print("\n=== Testing full score gradient ===")
    rng = np.random.default_rng(11)
    std = 1.0 / np.sqrt(2)
    params = [rng.normal(0.0, std, (4, 2)) for _ in range(4)] + [np.ones((4, 1))]
    f = _full_loss(LossConfig(lambda2=0.01), MaskConfig())
    assert grad_check(f, params) <= 1e-4
    print("[PASS] full score gradient")


def test_unmasked_loss_gradient_with_acyclicity():
    rng = np.random.default_rng(12)
    params = [rng.normal(0.0, 0.5, (4, 2)) for _ in range(4)] + [np.ones((4, 1))]
    f = _full_loss(LossConfig(lambda1=1.0, lambda2=0.01, use_mask=False), MaskConfig(mode=MaskMode.SOFT))
    assert grad_check(f, params) <= 1e-4


def test_scaled_loss_gradient_with_acyclic_log_det():
    """D·Sᵀ scaling and log-det taken from W∘H, as in masked training."""
    rng = np.random.default_rng(13)
    x = rng.normal(size=(20, 4))
    y = rng.normal(size=(20, 4))
    hard = hard_mask_from(PriorityVector(np.array([0.3, -0.2, 1.0, 0.5])), 0.01)
    cfg = LossConfig(lambda2=0.01, scaled=True)

    def f(t, v):
        e_so0, e_to0, e_so1, e_to1, priority = v
        w = record_low_rank(t, e_so0, e_to0)
        a = record_lagged(t, [record_low_rank(t, e_so1, e_to1)], 4)
        m = record_orientation_matrix(t, priority, MaskConfig(), np.random.default_rng(7))
        w_dag = record_masked(t, w, t.constant(hard))
        return record_loss(t, t.constant(x), t.constant(y), record_masked(t, w, m), a, cfg, w_dag=w_dag).total

    params = [rng.normal(0.0, 0.7, (4, 2)) for _ in range(4)] + [np.ones((4, 1))]
    assert grad_check(f, params) <= 1e-4


def main():
    print("=" * 60)
    print("Autodiff tests")
    print("=" * 60)
    test_matmul_and_transpose_gradients()
    test_logabsdet_gradient()
    test_elementwise_gradients()
    test_structural_gradients()
    test_pairwise_diff_orientation()
    test_vstack_empty_is_zero_rows()
    test_gradmap_absent_and_constants()
    test_backward_errors()
    test_log_scalar_domain()
    test_grad_check_eps_range()
    test_full_loss_gradient_at_initialization()
    test_unmasked_loss_gradient_with_acyclicity()
    test_scaled_loss_gradient_with_acyclic_log_det()
    print("\nALL AUTODIFF TESTS PASSED")


if __name__ == "__main__":
    main()
