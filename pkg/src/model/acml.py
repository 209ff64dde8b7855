"""Asymptotic causal mask learning.

A learnable priority vector p orders the nodes; the orientation matrix M
lets u -> v through only when p_v exceeds p_u by more than omega. The
hard mask is a strict order and therefore always acyclic.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.autodiff.tape import (
    Tape,
    Var,
    logistic,
    record_elementwise,
    record_pairwise_diff,
)
from src.config import DEFAULT_OMEGA, DEFAULT_TAU
from src.errors import InputError

GUMBEL_CLAMP = 1e-12
PROB_CLAMP = 1e-15


class MaskMode(Enum):
    """How the orientation matrix is evaluated."""
    STOCHASTIC = "stochastic"
    SOFT = "soft-deterministic"
    HARD = "hard"


@dataclass(frozen=True)
class MaskConfig:
    """Threshold omega, temperature tau and evaluation mode."""
    omega: float = DEFAULT_OMEGA
    tau: float = DEFAULT_TAU
    mode: MaskMode = MaskMode.STOCHASTIC

    def __post_init__(self):
        if not self.omega > 0:
            raise InputError(f"omega must be strictly positive, got {self.omega}")
        if not self.tau > 0:
            raise InputError(f"tau must be strictly positive, got {self.tau}")
        if not isinstance(self.mode, MaskMode):
            object.__setattr__(self, "mode", MaskMode(self.mode))


@dataclass
class PriorityVector:
    """Per-node priority scores."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.values)):
            raise InputError("priority vector has non-finite entries")

    @classmethod
    def ones(cls, d: int) -> "PriorityVector":
        return cls(np.ones(d))

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def differences(self) -> np.ndarray:
        """Δ[u, v] = p_v − p_u."""
        return self.values[None, :] - self.values[:, None]


def sample_gumbel(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard Gumbel draws −log(−log(u)) with u clamped away from 0 and 1."""
    u = np.clip(rng.random((rows, cols)), GUMBEL_CLAMP, 1.0 - GUMBEL_CLAMP)
    return -np.log(-np.log(u))


def _off_diagonal(d: int) -> np.ndarray:
    return 1.0 - np.eye(d)


def orientation_matrix(
    p: PriorityVector,
    cfg: MaskConfig,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Orientation matrix M with entries in [0, 1] and a zero diagonal."""
    d = p.d
    delta = p.differences() - cfg.omega

    if cfg.mode is MaskMode.HARD:
        return hard_mask_from(p, cfg.omega)

    if cfg.mode is MaskMode.SOFT:
        return logistic(delta / cfg.tau) * _off_diagonal(d)

    if rng is None:
        raise InputError("stochastic orientation matrix needs a random generator")
    noise = sample_gumbel(rng, d, d) - sample_gumbel(rng, d, d)
    mask = np.clip(logistic((delta + noise) / cfg.tau), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return mask * _off_diagonal(d)


def hard_mask_from(p: PriorityVector, omega: float) -> np.ndarray:
    """Binary mask indicator[p_v − p_u > omega], zero diagonal."""
    if not omega > 0:
        raise InputError(f"omega must be strictly positive, got {omega}")
    mask = (p.differences() > omega).astype(np.float64)
    np.fill_diagonal(mask, 0.0)
    return mask


def record_orientation_matrix(
    tape: Tape,
    p: Var,
    cfg: MaskConfig,
    rng: Optional[np.random.Generator] = None,
) -> Var:
    """Orientation matrix on the tape; gradients reach p through the sigmoid.

    Gumbel noise enters as a constant, so it is not differentiated.
    """
    d = p.shape[0]
    if cfg.mode is MaskMode.HARD:
        return tape.constant(hard_mask_from(PriorityVector(p.value[:, 0]), cfg.omega))

    offset = np.full((d, d), -cfg.omega)
    if cfg.mode is MaskMode.STOCHASTIC:
        if rng is None:
            raise InputError("stochastic orientation matrix needs a random generator")
        offset = offset + sample_gumbel(rng, d, d) - sample_gumbel(rng, d, d)

    logits = record_elementwise(tape, "add", record_pairwise_diff(tape, p), tape.constant(offset))
    probs = record_elementwise(tape, "sigmoid", record_elementwise(tape, "scale", logits, 1.0 / cfg.tau))
    if cfg.mode is MaskMode.STOCHASTIC:
        # squeeze into [PROB_CLAMP, 1 − PROB_CLAMP] like orientation_matrix
        probs = record_elementwise(
            tape,
            "add",
            record_elementwise(tape, "scale", probs, 1.0 - 2.0 * PROB_CLAMP),
            tape.constant(np.full((d, d), PROB_CLAMP)),
        )
    return record_elementwise(tape, "hadamard", probs, tape.constant(_off_diagonal(d)))


def temperature(epoch: int, epochs: int, tau_start: float, tau_end: float) -> float:
    """tau_start for the first two thirds of training, then linear to tau_end."""
    anneal_from = int(round(epochs * 2 / 3))
    if epoch < anneal_from or epochs <= 1:
        return tau_start
    span = max(1, epochs - 1 - anneal_from)
    frac = min(1.0, (epoch - anneal_from) / span)
    return tau_start + frac * (tau_end - tau_start)
