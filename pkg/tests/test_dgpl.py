"""Tests for low-rank embedding dictionaries."""

import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.autodiff import Tape
from src.errors import DimensionError, InputError
from src.linalg import numerical_rank
from src.model.dgpl import (
    EmbeddingDictionaries,
    assemble_instantaneous,
    assemble_lagged,
    default_embed_dim,
    lag_blocks,
    masked_instantaneous,
    record_low_rank,
)
from src.model.local import LocalModel


def test_default_embed_dim():
    assert default_embed_dim(10) == 4
    assert default_embed_dim(20) == 8
    assert default_embed_dim(5) == 2
    assert default_embed_dim(2) == 1


def test_initialize_shapes_and_scale():
    print("\n=== Testing embedding initialisation ===")
    e = EmbeddingDictionaries.initialize(d=50, lag_order=2, k=16, rng=np.random.default_rng(0))
    assert e.e_so.shape == (3, 50, 16)
    assert e.lag_order == 2 and e.d == 50 and e.embed_dim == 16
    assert abs(e.e_so.std() - 0.25) < 0.02
    print("[PASS] embedding initialisation")


def test_embed_dim_bounds():
    with pytest.raises(InputError):
        EmbeddingDictionaries.initialize(d=4, lag_order=1, k=5, rng=np.random.default_rng(0))
    with pytest.raises(InputError):
        EmbeddingDictionaries.initialize(d=4, lag_order=1, k=0, rng=np.random.default_rng(0))
    with pytest.raises(DimensionError):
        EmbeddingDictionaries(np.zeros((2, 3, 2)), np.zeros((2, 3, 1)))


def test_low_rank_assembly():
    print("\n=== Testing low-rank assembly ===")
    rng = np.random.default_rng(1)
    e = EmbeddingDictionaries.initialize(d=8, lag_order=2, k=3, rng=rng)
    w = assemble_instantaneous(e)
    assert w.shape == (8, 8)
    assert numerical_rank(w) <= 3
    blocks = lag_blocks(e)
    assert len(blocks) == 2
    stacked = assemble_lagged(e)
    assert stacked.shape == (16, 8)
    assert np.array_equal(stacked[8:], blocks[1])
    print("[PASS] low-rank assembly")


def test_no_lags_gives_empty_stack():
    e = EmbeddingDictionaries.initialize(d=3, lag_order=0, k=1, rng=np.random.default_rng(2))
    assert assemble_lagged(e).shape == (0, 3)


def test_masked_instantaneous():
    e = EmbeddingDictionaries.initialize(d=3, lag_order=0, k=2, rng=np.random.default_rng(3))
    mask = np.triu(np.ones((3, 3)), k=1)
    masked = masked_instantaneous(e, mask)
    assert np.all(np.tril(masked) == 0.0)
    with pytest.raises(DimensionError):
        masked_instantaneous(e, np.ones((2, 2)))


def test_taped_low_rank_matches_numpy():
    e = EmbeddingDictionaries.initialize(d=5, lag_order=1, k=2, rng=np.random.default_rng(4))
    t = Tape()
    w = record_low_rank(t, t.leaf(e.e_so[0]), t.leaf(e.e_to[0]))
    assert np.allclose(w.value, assemble_instantaneous(e))


def test_model_without_embeddings():
    """Direct parameters are full d x d matrices."""
    model = LocalModel.initialize(6, 2, 2, np.random.default_rng(5), use_dgpl=False, use_mask=False)
    assert set(model.params) == {"w", "a"}
    assert model.params["a"].shape == (2, 6, 6)
    assert model.embeddings is None and model.priority is None
    assert np.array_equal(model.evaluation_mask(0.01), 1.0 - np.eye(6))


def main():
    print("=" * 60)
    print("Embedding tests")
    print("=" * 60)
    test_default_embed_dim()
    test_initialize_shapes_and_scale()
    test_embed_dim_bounds()
    test_low_rank_assembly()
    test_no_lags_gives_empty_stack()
    test_masked_instantaneous()
    test_taped_low_rank_matches_numpy()
    test_model_without_embeddings()
    print("\nALL EMBEDDING TESTS PASSED")


if __name__ == "__main__":
    main()
