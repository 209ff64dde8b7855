"""Reverse-mode differentiation on a recorded tape."""

from src.autodiff.gradcheck import grad_check
from src.autodiff.tape import (
    ELEMENTWISE_KINDS,
    L1_SMOOTH_EPS,
    GradMap,
    Tape,
    Var,
    backward,
    logistic,
    record_acyclicity,
    record_column_scaling,
    record_elementwise,
    record_logabsdet,
    record_matmul,
    record_pairwise_diff,
    record_transpose,
    record_vstack,
)

__all__ = [
    "ELEMENTWISE_KINDS",
    "L1_SMOOTH_EPS",
    "GradMap",
    "Tape",
    "Var",
    "backward",
    "grad_check",
    "logistic",
    "record_acyclicity",
    "record_column_scaling",
    "record_elementwise",
    "record_logabsdet",
    "record_matmul",
    "record_pairwise_diff",
    "record_transpose",
    "record_vstack",
]
