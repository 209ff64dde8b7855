"""Model components: orientation mask, embeddings, score functions."""

from src.model.acml import (
    MaskConfig,
    MaskMode,
    PriorityVector,
    hard_mask_from,
    orientation_matrix,
    sample_gumbel,
)
from src.model.dgpl import (
    EmbeddingDictionaries,
    assemble_instantaneous,
    assemble_lagged,
    default_embed_dim,
    masked_instantaneous,
)
from src.model.local import LocalModel
from src.model.objective import (
    LossConfig,
    LossKind,
    LossValue,
    alpha_matrix,
    h_acyclicity,
    lse_loss,
    profile_loss,
    qmle_loss,
    residual,
    scaling_matrix_D,
    sigma_hat_sq,
)

__all__ = [
    "EmbeddingDictionaries",
    "LocalModel",
    "LossConfig",
    "LossKind",
    "LossValue",
    "MaskConfig",
    "MaskMode",
    "PriorityVector",
    "alpha_matrix",
    "assemble_instantaneous",
    "assemble_lagged",
    "default_embed_dim",
    "h_acyclicity",
    "hard_mask_from",
    "lse_loss",
    "masked_instantaneous",
    "orientation_matrix",
    "profile_loss",
    "qmle_loss",
    "residual",
    "sample_gumbel",
    "scaling_matrix_D",
    "sigma_hat_sq",
]
