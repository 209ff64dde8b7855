"""Dynamic graph parameter learning: low-rank source/target embeddings.

Slice 0 of each dictionary parameterises the instantaneous matrix W, slice
j the lag-j matrix A_j, each as E_so(j) · E_to(j)ᵀ.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from src.autodiff.tape import Tape, Var, record_elementwise, record_matmul, record_transpose, record_vstack
from src.config import EMBED_RATIO
from src.errors import DimensionError, InputError

DIRECT_INIT_STD = 0.1


def default_embed_dim(d: int) -> int:
    """k = round(2d/5), at least 1."""
    return max(1, int(round(EMBED_RATIO * d)))


@dataclass
class EmbeddingDictionaries:
    """Source and target embeddings, shape (lag_order + 1) x d x k each."""
    e_so: np.ndarray
    e_to: np.ndarray

    def __post_init__(self):
        self.e_so = np.asarray(self.e_so, dtype=np.float64)
        self.e_to = np.asarray(self.e_to, dtype=np.float64)
        if self.e_so.ndim != 3 or self.e_so.shape != self.e_to.shape:
            raise DimensionError(
                f"embedding shapes {self.e_so.shape} and {self.e_to.shape} must match and be 3-D"
            )
        if self.embed_dim > self.d:
            raise InputError(f"embedding dimension k={self.embed_dim} exceeds d={self.d}")

    @classmethod
    def initialize(cls, d: int, lag_order: int, k: int, rng: np.random.Generator) -> "EmbeddingDictionaries":
        """Gaussian entries with std 1/sqrt(k)."""
        if not 1 <= k <= d:
            raise InputError(f"embedding dimension k must lie in [1, d={d}], got {k}")
        if lag_order < 0:
            raise InputError(f"lag order must be nonnegative, got {lag_order}")
        std = 1.0 / np.sqrt(k)
        shape = (lag_order + 1, d, k)
        return cls(rng.normal(0.0, std, shape), rng.normal(0.0, std, shape))

    @property
    def lag_order(self) -> int:
        return self.e_so.shape[0] - 1

    @property
    def d(self) -> int:
        return self.e_so.shape[1]

    @property
    def embed_dim(self) -> int:
        return self.e_so.shape[2]


def assemble_instantaneous(e: EmbeddingDictionaries) -> np.ndarray:
    """W = E_so(t) · E_to(t)ᵀ."""
    return e.e_so[0] @ e.e_to[0].T


def lag_blocks(e: EmbeddingDictionaries) -> List[np.ndarray]:
    """[A_1, ..., A_p] with A_j = E_so(t−j) · E_to(t−j)ᵀ."""
    return [e.e_so[j] @ e.e_to[j].T for j in range(1, e.lag_order + 1)]


def assemble_lagged(e: EmbeddingDictionaries) -> np.ndarray:
    """A = [A_1; ...; A_p] stacked to (p·d) x d, conformant with Y."""
    blocks = lag_blocks(e)
    if not blocks:
        return np.zeros((0, e.d))
    return np.vstack(blocks)


def masked_instantaneous(e: EmbeddingDictionaries, mask: np.ndarray) -> np.ndarray:
    """W ∘ M."""
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != (e.d, e.d):
        raise DimensionError(f"mask shape {mask.shape} does not match d={e.d}")
    return assemble_instantaneous(e) * mask


def record_low_rank(tape: Tape, source: Var, target: Var) -> Var:
    """source · targetᵀ on the tape."""
    return record_matmul(tape, source, record_transpose(tape, target))


def record_lagged(tape: Tape, blocks: List[Var], d: int) -> Var:
    return record_vstack(tape, blocks, cols=d)


def record_masked(tape: Tape, w: Var, mask: Var) -> Var:
    return record_elementwise(tape, "hadamard", w, mask)
