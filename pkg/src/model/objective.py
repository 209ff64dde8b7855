"""Score functions for the structural VAR model X_t·S = Y·A + N, S = I − W.

The quasi-maximum-likelihood score profiles the equal noise variance out
of a Gaussian likelihood:

    (d/2)·log ‖X·S − Y·A‖²_F − log|det S| + λ2·(‖W‖₁ + ‖A‖₁) [+ λ1·h(W)]

This is a proper negative log-likelihood, so it is bounded below even
when a soft mask lets both directions of a pair through. The scaled
variant (LossConfig.scaled) fits (X·S − Y·A)·D·Sᵀ instead, with
D = {I + diag(WᵀW)}⁻¹; that term stays bounded as |W| grows, so −log|det S|
alone can run off to −∞ on a 2-cycle. During masked training the
log-determinant, D and Sᵀ are therefore taken from the hard-masked W,
whose support is a DAG.

The least-squares variant replaces the first two terms by
(1/2n)·‖X·S − Y·A‖²_F. λ1·h(W) only enters when no orientation mask is
used.
"""

from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Dict, Iterable, Optional

import numpy as np

from src.autodiff.tape import (
    Tape,
    Var,
    record_acyclicity,
    record_column_scaling,
    record_elementwise,
    record_logabsdet,
    record_matmul,
    record_transpose,
)
from src.config import DEFAULT_LAMBDA2
from src.errors import DimensionError, InputError
from src.linalg.core import as_matrix, matrix_exponential


class LossKind(Enum):
    """Data-fit term."""
    QMLE = "qmle"
    LSE = "lse"


@dataclass(frozen=True)
class LossConfig:
    """Penalty weights and score kind; scaled picks the D·Sᵀ-scaled QMLE fit."""
    lambda1: float = 0.0
    lambda2: float = DEFAULT_LAMBDA2
    kind: LossKind = LossKind.QMLE
    use_mask: bool = True
    scaled: bool = False

    def __post_init__(self):
        if not isinstance(self.kind, LossKind):
            object.__setattr__(self, "kind", LossKind(self.kind))
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise InputError(f"penalty weights must be nonnegative, got {self.lambda1}, {self.lambda2}")
        if self.use_mask and self.lambda1 != 0:
            raise InputError("lambda1 must be 0 when the orientation mask is used")


@dataclass(frozen=True)
class LossValue:
    """Decomposed score; total = data − logdet + sparsity + acyclicity."""
    total: float
    data_term: float
    logdet_term: float
    sparsity_term: float
    acyclicity_term: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> "LossValue":
        return cls(**{k: float(data[k]) for k in cls.__dataclass_fields__})

    @classmethod
    def mean(cls, values: Iterable["LossValue"]) -> "LossValue":
        values = list(values)
        if not values:
            raise ValueError("mean of no loss values")
        return cls(**{
            name: float(np.mean([getattr(v, name) for v in values]))
            for name in cls.__dataclass_fields__
        })


@dataclass
class LossTerms:
    """Tape handles of the loss components."""
    total: Var
    data: Var
    logdet: Optional[Var]
    sparsity: Var
    acyclicity: Optional[Var]

    def value(self) -> LossValue:
        return LossValue(
            total=self.total.scalar,
            data_term=self.data.scalar,
            logdet_term=self.logdet.scalar if self.logdet is not None else 0.0,
            sparsity_term=self.sparsity.scalar,
            acyclicity_term=self.acyclicity.scalar if self.acyclicity is not None else 0.0,
        )


def scaling_matrix_D(w) -> np.ndarray:
    """D[i, i] = 1 / (1 + Σ_j w[j, i]²)."""
    w = as_matrix(w)
    return np.diag(1.0 / (1.0 + np.sum(w * w, axis=0)))


def _check_shapes(x: np.ndarray, y: np.ndarray, w: np.ndarray, a: np.ndarray) -> None:
    n, d = x.shape
    if w.shape != (d, d):
        raise DimensionError(f"W has shape {w.shape}, expected {d}x{d}")
    if y.shape[0] != n:
        raise DimensionError(f"Y has {y.shape[0]} rows, X has {n}")
    if a.shape != (y.shape[1], d):
        raise DimensionError(f"A has shape {a.shape}, expected {y.shape[1]}x{d}")


def residual(x, y, w_eff, a) -> np.ndarray:
    """R = X·(I − W) − Y·A."""
    x, y, w_eff, a = (as_matrix(m) for m in (x, y, w_eff, a))
    _check_shapes(x, y, w_eff, a)
    r = x @ (np.eye(w_eff.shape[0]) - w_eff)
    if a.shape[0]:
        r = r - y @ a
    return r


def sigma_hat_sq(r) -> float:
    """Equal-variance noise estimate ‖R‖²_F / (n·d)."""
    r = as_matrix(r)
    return float(np.sum(r * r) / r.size)


def h_acyclicity(w) -> float:
    """Tr(e^{W∘W}) − d; zero exactly when the support of W is acyclic."""
    w = as_matrix(w)
    return float(np.trace(matrix_exponential(w * w)) - w.shape[0])


def alpha_matrix(w) -> np.ndarray:
    """α_ij = ((w_ij + w_ji) − Σ_k w_ki·w_kj) / (1 + Σ_k w_ki²), zero diagonal."""
    w = as_matrix(w)
    numerator = w + w.T - w.T @ w
    denominator = 1.0 + np.sum(w * w, axis=0)
    alpha = numerator / denominator[:, None]
    np.fill_diagonal(alpha, 0.0)
    return alpha


def record_loss(
    tape: Tape,
    x: Var,
    y: Var,
    w_eff: Var,
    a: Var,
    cfg: LossConfig,
    lambda1: Optional[float] = None,
    w_dag: Optional[Var] = None,
) -> LossTerms:
    """Record the configured score on the tape.

    Args:
        lambda1: Overrides cfg.lambda1 (escalation schedule)
        w_dag: W restricted to an acyclic support; when given, log|det S|
            and the scaled fit's D and Sᵀ are computed from it
    """
    _check_shapes(x.value, y.value, w_eff.value, a.value)
    n, d = x.shape
    lambda1 = cfg.lambda1 if lambda1 is None else lambda1
    eye = tape.constant(np.eye(d))

    s = record_elementwise(tape, "sub", eye, w_eff)
    r = record_matmul(tape, x, s)
    if a.shape[0]:
        r = record_elementwise(tape, "sub", r, record_matmul(tape, y, a))

    logdet = None
    if cfg.kind is LossKind.QMLE:
        if w_dag is not None:
            if w_dag.shape != (d, d):
                raise DimensionError(f"acyclic W has shape {w_dag.shape}, expected {d}x{d}")
            w_jac, s_jac = w_dag, record_elementwise(tape, "sub", eye, w_dag)
        else:
            w_jac, s_jac = w_eff, s
        fit = r
        if cfg.scaled:
            fit = record_matmul(tape, record_matmul(tape, r, record_column_scaling(tape, w_jac)),
                                record_transpose(tape, s_jac))
        norm = record_elementwise(tape, "frobenius_sq", fit)
        data = record_elementwise(tape, "scale", record_elementwise(tape, "log_scalar", norm), d / 2.0)
        logdet = record_logabsdet(tape, s_jac)
    else:
        data = record_elementwise(tape, "scale", record_elementwise(tape, "frobenius_sq", r), 1.0 / (2.0 * n))

    l1 = record_elementwise(tape, "l1_smooth", w_eff)
    if a.shape[0]:
        l1 = record_elementwise(tape, "add", l1, record_elementwise(tape, "l1_smooth", a))
    sparsity = record_elementwise(tape, "scale", l1, cfg.lambda2)

    total = data if logdet is None else record_elementwise(tape, "sub", data, logdet)
    total = record_elementwise(tape, "add", total, sparsity)

    acyclicity = None
    if not cfg.use_mask and lambda1 > 0:
        acyclicity = record_elementwise(tape, "scale", record_acyclicity(tape, w_eff), lambda1)
        total = record_elementwise(tape, "add", total, acyclicity)

    return LossTerms(total=total, data=data, logdet=logdet, sparsity=sparsity, acyclicity=acyclicity)


def _evaluate(x, y, w_eff, a, cfg: LossConfig) -> LossValue:
    tape = Tape()
    terms = record_loss(
        tape,
        tape.constant(x),
        tape.constant(y),
        tape.constant(w_eff),
        tape.constant(np.asarray(a, dtype=np.float64).reshape(-1, as_matrix(x).shape[1])),
        cfg,
    )
    return terms.value()


def qmle_loss(x, y, w_eff, a, cfg: LossConfig) -> LossValue:
    """Quasi-maximum-likelihood score of (W, A) on aligned samples, D·Sᵀ-scaled fit."""
    return _evaluate(x, y, w_eff, a, replace(cfg, kind=LossKind.QMLE, scaled=True))


def profile_loss(x, y, w_eff, a, cfg: LossConfig) -> LossValue:
    """Unscaled QMLE score, the Gaussian profile likelihood training minimises."""
    return _evaluate(x, y, w_eff, a, replace(cfg, kind=LossKind.QMLE, scaled=False))


def lse_loss(x, y, w_eff, a, cfg: LossConfig) -> LossValue:
    """Least-squares score; the log-det term is zero."""
    return _evaluate(x, y, w_eff, a, replace(cfg, kind=LossKind.LSE))
