"""Parameter container for the full model and its ablations.

With DGPL the causal matrices come from embedding dictionaries; without it
W and each A_j are free d x d parameters. With ACML the instantaneous
matrix is masked by an orientation matrix learned through a priority
vector; without it only self-loops are masked out.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from src.autodiff.tape import GradMap, Tape, Var
from src.model.acml import MaskConfig, PriorityVector, hard_mask_from, record_orientation_matrix
from src.model.dgpl import (
    DIRECT_INIT_STD,
    EmbeddingDictionaries,
    record_lagged,
    record_low_rank,
    record_masked,
)


@dataclass
class ModelPass:
    """Tape handles produced by one forward pass; w is W before masking."""
    w: Var
    w_eff: Var
    a: Var
    mask: Var
    leaves: Dict[str, List[Var]]


class LocalModel:
    """Learnable parameters keyed by name."""

    def __init__(
        self,
        params: Dict[str, np.ndarray],
        d: int,
        lag_order: int,
        use_dgpl: bool = True,
        use_mask: bool = True,
    ):
        self.params = params
        self.d = d
        self.lag_order = lag_order
        self.use_dgpl = use_dgpl
        self.use_mask = use_mask

    @classmethod
    def initialize(
        cls,
        d: int,
        lag_order: int,
        embed_dim: int,
        rng: np.random.Generator,
        use_dgpl: bool = True,
        use_mask: bool = True,
    ) -> "LocalModel":
        if use_dgpl:
            emb = EmbeddingDictionaries.initialize(d, lag_order, embed_dim, rng)
            params = {"e_so": emb.e_so, "e_to": emb.e_to}
        else:
            params = {
                "w": rng.normal(0.0, DIRECT_INIT_STD, (d, d)),
                "a": rng.normal(0.0, DIRECT_INIT_STD, (lag_order, d, d)),
            }
        if use_mask:
            params["priority"] = PriorityVector.ones(d).values
        return cls(params, d, lag_order, use_dgpl, use_mask)

    def copy(self) -> "LocalModel":
        return LocalModel(
            {k: v.copy() for k, v in self.params.items()},
            self.d,
            self.lag_order,
            self.use_dgpl,
            self.use_mask,
        )

    @property
    def embeddings(self) -> Optional[EmbeddingDictionaries]:
        if not self.use_dgpl:
            return None
        return EmbeddingDictionaries(self.params["e_so"], self.params["e_to"])

    @property
    def priority(self) -> Optional[PriorityVector]:
        if not self.use_mask:
            return None
        return PriorityVector(self.params["priority"])

    def instantaneous(self) -> np.ndarray:
        """Unmasked W."""
        if self.use_dgpl:
            return self.params["e_so"][0] @ self.params["e_to"][0].T
        return self.params["w"].copy()

    def lag_blocks(self) -> List[np.ndarray]:
        if self.use_dgpl:
            e_so, e_to = self.params["e_so"], self.params["e_to"]
            return [e_so[j] @ e_to[j].T for j in range(1, self.lag_order + 1)]
        return [block.copy() for block in self.params["a"]]

    def evaluation_mask(self, omega: float) -> np.ndarray:
        """Hard orientation mask, or the off-diagonal ones without ACML."""
        if self.use_mask:
            return hard_mask_from(self.priority, omega)
        return 1.0 - np.eye(self.d)

    def record(self, tape: Tape, mask_cfg: MaskConfig, rng: np.random.Generator) -> ModelPass:
        """Assemble masked W and stacked A on the tape."""
        leaves: Dict[str, List[Var]] = {}
        if self.use_dgpl:
            e_so, e_to = self.params["e_so"], self.params["e_to"]
            leaves["e_so"] = [tape.leaf(e_so[j]) for j in range(self.lag_order + 1)]
            leaves["e_to"] = [tape.leaf(e_to[j]) for j in range(self.lag_order + 1)]
            products = [record_low_rank(tape, s, t) for s, t in zip(leaves["e_so"], leaves["e_to"])]
            w, blocks = products[0], products[1:]
        else:
            leaves["w"] = [tape.leaf(self.params["w"])]
            leaves["a"] = [tape.leaf(block) for block in self.params["a"]]
            w, blocks = leaves["w"][0], leaves["a"]

        if self.use_mask:
            leaves["priority"] = [tape.leaf(self.params["priority"][:, None])]
            mask = record_orientation_matrix(tape, leaves["priority"][0], mask_cfg, rng)
        else:
            mask = tape.constant(1.0 - np.eye(self.d))

        return ModelPass(
            w=w,
            w_eff=record_masked(tape, w, mask),
            a=record_lagged(tape, blocks, self.d),
            mask=mask,
            leaves=leaves,
        )

    def gradients(self, grads: GradMap, forward: ModelPass) -> Dict[str, np.ndarray]:
        """Collect leaf adjoints back into parameter-shaped arrays."""
        out = {}
        for name, param in self.params.items():
            leaves = forward.leaves[name]
            if name == "priority":
                out[name] = grads[leaves[0]][:, 0].copy()
            elif name == "w":
                out[name] = grads[leaves[0]].copy()
            else:
                out[name] = (
                    np.stack([grads[leaf] for leaf in leaves]) if leaves else np.zeros_like(param)
                )
        return out
