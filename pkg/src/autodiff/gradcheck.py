"""Central finite-difference check of tape gradients."""

from typing import Callable, List, Sequence

import numpy as np

from src.autodiff.tape import Tape, Var, backward
from src.errors import InputError

ScalarFn = Callable[[Tape, List[Var]], Var]


def _evaluate(f: ScalarFn, params: Sequence[np.ndarray]) -> float:
    tape = Tape()
    leaves = [tape.leaf(p) for p in params]
    return f(tape, leaves).scalar


def grad_check(f: ScalarFn, params: Sequence[np.ndarray], eps: float = 1e-6) -> float:
    """Largest relative error between tape and central-difference gradients.

    Args:
        f: Builds a scalar on the given tape from one leaf per parameter
        params: Parameter matrices (not modified)
        eps: Central-difference step, within [1e-7, 1e-3]

    Returns:
        max over coordinates of |a − n| / (|a| + |n| + 1e-10)
    """
    if not 1e-7 <= eps <= 1e-3:
        raise InputError(f"grad_check eps must lie in [1e-7, 1e-3], got {eps}")

    params = [np.array(p, dtype=np.float64, ndmin=2) for p in params]
    tape = Tape()
    leaves = [tape.leaf(p) for p in params]
    grads = backward(tape, f(tape, leaves))

    worst = 0.0
    for index, (param, leaf) in enumerate(zip(params, leaves)):
        analytic = grads[leaf]
        for coord in np.ndindex(param.shape):
            shifted = [p.copy() for p in params]
            shifted[index][coord] = param[coord] + eps
            upper = _evaluate(f, shifted)
            shifted[index][coord] = param[coord] - eps
            lower = _evaluate(f, shifted)
            numeric = (upper - lower) / (2.0 * eps)
            a = analytic[coord]
            worst = max(worst, abs(a - numeric) / (abs(a) + abs(numeric) + 1e-10))
    return worst
