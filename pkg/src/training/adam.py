"""Adam optimizer over named numpy parameters."""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.errors import DimensionError, NonFiniteError


@dataclass
class AdamState:
    """Moment estimates and step counter."""
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    state: AdamState,
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
) -> Dict[str, np.ndarray]:
    """One bias-corrected Adam update; returns new parameter arrays.

    Raises:
        NonFiniteError: If any gradient has NaN or infinite entries; the
            state and parameters are left untouched
    """
    for name, param in params.items():
        grad = grads[name]
        if grad.shape != param.shape:
            raise DimensionError(f"gradient for {name} has shape {grad.shape}, expected {param.shape}")
        if not np.all(np.isfinite(grad)):
            raise NonFiniteError(f"non-finite gradient for {name}")

    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t

    updated = {}
    for name, param in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(param)
            state.v[name] = np.zeros_like(param)
        state.m[name] = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        state.v[name] = state.beta2 * state.v[name] + (1.0 - state.beta2) * (g * g)
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        updated[name] = param - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return updated
