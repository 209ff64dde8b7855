"""Tests for the QMLE and least-squares scores."""

import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.autodiff import Tape
from src.errors import DimensionError, InputError
from src.model.objective import (
    LossConfig,
    LossKind,
    LossValue,
    alpha_matrix,
    h_acyclicity,
    lse_loss,
    profile_loss,
    qmle_loss,
    record_loss,
    residual,
    scaling_matrix_D,
    sigma_hat_sq,
)
from src.synthetic.generator import sample_er_dag


def _problem(seed=0, n=40, d=4):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    y = rng.normal(size=(n, d))
    w = np.triu(rng.normal(0.0, 0.5, (d, d)), k=1)
    a = rng.normal(0.0, 0.3, (d, d))
    return x, y, w, a


def test_residual_vanishes_on_noise_free_data():
    print("\n=== Testing residual ===")
    _, y, w, a = _problem()
    s = np.eye(4) - w
    x = y @ a @ np.linalg.inv(s)
    assert np.max(np.abs(residual(x, y, w, a))) < 1e-10
    print("[PASS] residual")


def test_residual_without_lags():
    x, _, w, _ = _problem()
    r = residual(x, np.zeros((40, 0)), w, np.zeros((0, 4)))
    assert np.allclose(r, x @ (np.eye(4) - w))


def test_shape_errors():
    x, y, w, a = _problem()
    with pytest.raises(DimensionError):
        residual(x, y, w[:3, :3], a)
    with pytest.raises(DimensionError):
        residual(x, y[:10], w, a)


def test_scaling_matrix():
    assert np.array_equal(scaling_matrix_D(np.zeros((3, 3))), np.eye(3))
    w = np.array([[0.0, 2.0], [0.0, 0.0]])
    assert np.allclose(np.diag(scaling_matrix_D(w)), [1.0, 0.2])


def test_sigma_hat():
    assert sigma_hat_sq(np.full((4, 5), 2.0)) == 4.0


def test_qmle_components_match_closed_form():
    print("\n=== Testing QMLE decomposition ===")
    x, y, w, a = _problem(seed=1)
    cfg = LossConfig(lambda2=0.05)
    value = qmle_loss(x, y, w, a, cfg)

    s = np.eye(4) - w
    r = x @ s - y @ a
    d_mat = scaling_matrix_D(w)
    data = 2.0 * np.log(np.sum((r @ d_mat @ s.T) ** 2))
    logdet = np.log(abs(np.linalg.det(s)))
    sparsity = 0.05 * (np.sum(np.sqrt(w ** 2 + 1e-8)) + np.sum(np.sqrt(a ** 2 + 1e-8)))

    assert np.isclose(value.data_term, data, rtol=1e-12)
    assert np.isclose(value.logdet_term, logdet, atol=1e-12)
    assert np.isclose(value.sparsity_term, sparsity, rtol=1e-12)
    assert value.acyclicity_term == 0.0
    assert np.isclose(value.total, data - logdet + sparsity, rtol=1e-12)
    print("[PASS] QMLE decomposition")


def test_profile_components_match_closed_form():
    x, y, w, a = _problem(seed=1)
    value = profile_loss(x, y, w, a, LossConfig(lambda2=0.05))
    s = np.eye(4) - w
    r = x @ s - y @ a
    assert np.isclose(value.data_term, 2.0 * np.log(np.sum(r * r)), rtol=1e-12)
    assert np.isclose(value.logdet_term, np.log(abs(np.linalg.det(s))), atol=1e-12)
    assert np.isclose(value.total, value.data_term - value.logdet_term + value.sparsity_term, rtol=1e-12)


def test_two_cycle_cannot_drive_the_score_down():
    """Growing both weights of a 2-cycle sends −log|det S| to −∞."""
    print("\n=== Testing 2-cycle boundedness ===")
    rng = np.random.default_rng(6)
    x = rng.normal(size=(200, 2))
    y, a = np.zeros((200, 0)), np.zeros((0, 2))
    cfg = LossConfig(lambda2=0.0)
    empty = np.zeros((2, 2))
    base = profile_loss(x, y, empty, a, cfg).total
    for c in (2.0, 10.0, 100.0, 1000.0):
        cycle = np.array([[0.0, c], [c, 0.0]])
        assert profile_loss(x, y, cycle, a, cfg).total > base - 0.1
    # the D·Sᵀ-scaled fit stays bounded, so nothing stops the log-det
    far = np.array([[0.0, 1e3], [1e3, 0.0]])
    assert qmle_loss(x, y, far, a, cfg).total < qmle_loss(x, y, empty, a, cfg).total - 10.0
    print("[PASS] 2-cycle boundedness")


def test_acyclic_weights_take_over_the_log_det():
    x, y, w, a = _problem(seed=7)
    w_eff = w.copy()
    w_eff[3, 0] = 0.4  # closes a cycle through the upper triangle
    for scaled in (False, True):
        t = Tape()
        terms = record_loss(
            t, t.constant(x), t.constant(y), t.constant(w_eff), t.constant(a),
            LossConfig(lambda2=0.0, scaled=scaled), w_dag=t.constant(w),
        )
        value = terms.value()
        assert value.logdet_term == 0.0
        r = residual(x, y, w_eff, a)
        if scaled:
            r = r @ scaling_matrix_D(w) @ (np.eye(4) - w).T
        assert np.isclose(value.data_term, 2.0 * np.log(np.sum(r * r)), rtol=1e-12)
    with pytest.raises(DimensionError):
        t = Tape()
        record_loss(t, t.constant(x), t.constant(y), t.constant(w_eff), t.constant(a),
                    LossConfig(), w_dag=t.constant(np.zeros((3, 3))))


def test_lse_has_no_logdet():
    x, y, w, a = _problem(seed=2)
    value = lse_loss(x, y, w, a, LossConfig(lambda2=0.0))
    r = x @ (np.eye(4) - w) - y @ a
    assert value.logdet_term == 0.0
    assert np.isclose(value.data_term, np.sum(r * r) / 80.0)
    assert np.isclose(value.total, value.data_term)


def test_acyclicity_only_without_mask():
    x, y, _, a = _problem(seed=3)
    cyclic = np.array([[0, 0.5, 0, 0], [0.5, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    masked = qmle_loss(x, y, cyclic, a, LossConfig())
    unmasked = qmle_loss(x, y, cyclic, a, LossConfig(lambda1=2.0, use_mask=False))
    assert masked.acyclicity_term == 0.0
    assert np.isclose(unmasked.acyclicity_term, 2.0 * h_acyclicity(cyclic))
    assert unmasked.acyclicity_term > 0.0


def test_loss_config_validation():
    with pytest.raises(InputError):
        LossConfig(lambda1=1.0, use_mask=True)
    with pytest.raises(InputError):
        LossConfig(lambda2=-0.1)
    assert LossConfig(kind="lse").kind is LossKind.LSE


def test_h_acyclicity_detects_cycles():
    print("\n=== Testing acyclicity function ===")
    rng = np.random.default_rng(4)
    for d in range(2, 9):
        dag = sample_er_dag(d, 1.0 if d > 2 else 0.5, rng) * rng.uniform(0.5, 2.0, (d, d))
        assert abs(h_acyclicity(dag)) < 1e-12
        cyclic = dag.copy()
        cyclic[0, d - 1] = cyclic[d - 1, 0] = 0.7
        assert h_acyclicity(cyclic) > 0.1
    print("[PASS] acyclicity function")


def test_alpha_matrix_diagonal_zero():
    _, _, w, _ = _problem(seed=5)
    alpha = alpha_matrix(w)
    assert np.all(np.diag(alpha) == 0.0)
    assert alpha.shape == w.shape


def test_loss_value_helpers():
    a = LossValue(1.0, 2.0, 3.0, 4.0, 0.0)
    b = LossValue(3.0, 4.0, 5.0, 6.0, 2.0)
    mean = LossValue.mean([a, b])
    assert mean == LossValue(2.0, 3.0, 4.0, 5.0, 1.0)
    assert LossValue.from_dict(a.to_dict()) == a


def main():
    print("=" * 60)
    print("Objective tests")
    print("=" * 60)
    test_residual_vanishes_on_noise_free_data()
    test_residual_without_lags()
    test_shape_errors()
    test_scaling_matrix()
    test_sigma_hat()
    test_qmle_components_match_closed_form()
    test_profile_components_match_closed_form()
    test_two_cycle_cannot_drive_the_score_down()
    test_acyclic_weights_take_over_the_log_det()
    test_lse_has_no_logdet()
    test_acyclicity_only_without_mask()
    test_loss_config_validation()
    test_h_acyclicity_detects_cycles()
    test_alpha_matrix_diagonal_zero()
    test_loss_value_helpers()
    print("\nALL OBJECTIVE TESTS PASSED")


if __name__ == "__main__":
    main()
