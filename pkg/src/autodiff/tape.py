"""Tape-based reverse-mode differentiation over matrix values.

A Tape records every operation as a Node holding its kind, input node ids,
the forward value, and a vector-Jacobian product closure over the saved
forward values. backward() walks the nodes once in reverse order.

Scalars are 1x1 matrices throughout.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionError, LogDomainError, NonFiniteError
from src.linalg.core import as_matrix, lu_decompose, lu_inverse, matrix_exponential

L1_SMOOTH_EPS = 1e-8

Vjp = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

ELEMENTWISE_KINDS = (
    "hadamard",
    "add",
    "sub",
    "scale",
    "log_scalar",
    "frobenius_sq",
    "l1_smooth",
    "sigmoid",
)


@dataclass(frozen=True, slots=True)
class Node:
    """One recorded operation."""
    kind: str
    inputs: Tuple[int, ...]
    value: np.ndarray
    vjp: Optional[Vjp] = None


@dataclass(frozen=True, slots=True)
class Var:
    """Handle to a node on a tape."""
    node: int
    value: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.value.shape

    @property
    def scalar(self) -> float:
        return float(self.value[0, 0])


class GradMap:
    """Adjoints by node id; absent entries mean a zero adjoint."""

    def __init__(self, adjoints: Dict[int, np.ndarray]):
        self._adjoints = adjoints

    def __getitem__(self, var: Var) -> np.ndarray:
        adjoint = self._adjoints.get(var.node)
        if adjoint is None:
            return np.zeros_like(var.value)
        return adjoint

    def __contains__(self, var: Var) -> bool:
        return var.node in self._adjoints


class Tape:
    """Append-only record of operations; single-threaded."""

    def __init__(self):
        self.nodes: List[Node] = []

    def __len__(self) -> int:
        return len(self.nodes)

    def _record(
        self,
        kind: str,
        inputs: Sequence[Var],
        value: np.ndarray,
        vjp: Optional[Vjp] = None,
    ) -> Var:
        for var in inputs:
            if var.node >= len(self.nodes):
                raise ValueError(f"Input node {var.node} is not on this tape")
        # a read-only view, so callers' arrays stay writable without a copy
        value = np.asarray(value, dtype=np.float64).view()
        value.flags.writeable = False
        node = Node(kind=kind, inputs=tuple(v.node for v in inputs), value=value, vjp=vjp)
        self.nodes.append(node)
        return Var(node=len(self.nodes) - 1, value=value)

    def leaf(self, value) -> Var:
        """Record a differentiable input."""
        return self._record("leaf", (), as_matrix(value))

    def constant(self, value) -> Var:
        """Record a non-differentiated input (data, noise)."""
        return self._record("constant", (), as_matrix(value))


def _same_shape(kind: str, a: Var, b: Var) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{kind}: shapes {a.shape} and {b.shape} differ")


def _scalar(kind: str, a: Var) -> None:
    if a.shape != (1, 1):
        raise DimensionError(f"{kind} requires a 1x1 input, got {a.shape}")


def record_matmul(t: Tape, a: Var, b: Var) -> Var:
    """a·b; backward gives ḡ·bᵀ to a and aᵀ·ḡ to b."""
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: cannot multiply {a.shape} by {b.shape}")
    av, bv = a.value, b.value
    return t._record("matmul", (a, b), av @ bv, lambda g: (g @ bv.T, av.T @ g))


def record_logabsdet(t: Tape, a: Var) -> Var:
    """log|det a|; backward adds ḡ·(a⁻¹)ᵀ from the same LU factors."""
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"logabsdet requires a square input, got {a.shape}")
    factors = lu_decompose(a.value)
    value = np.sum(np.log(np.abs(factors.pivots)))
    inv_t = lu_inverse(factors).T
    return t._record("logabsdet", (a,), np.array([[value]]), lambda g: (g[0, 0] * inv_t,))


def record_elementwise(t: Tape, kind: str, *args, **params) -> Var:
    """Record one of ELEMENTWISE_KINDS.

    hadamard/add/sub take two Vars of equal shape; scale takes a Var and a
    float factor; the rest take a single Var. log_scalar, frobenius_sq and
    l1_smooth produce 1x1 results.
    """
    if kind == "hadamard":
        a, b = args
        _same_shape(kind, a, b)
        av, bv = a.value, b.value
        return t._record(kind, (a, b), av * bv, lambda g: (g * bv, g * av))

    if kind == "add":
        a, b = args
        _same_shape(kind, a, b)
        return t._record(kind, (a, b), a.value + b.value, lambda g: (g, g))

    if kind == "sub":
        a, b = args
        _same_shape(kind, a, b)
        return t._record(kind, (a, b), a.value - b.value, lambda g: (g, -g))

    if kind == "scale":
        (a, factor) = args
        factor = float(factor)
        return t._record(kind, (a,), factor * a.value, lambda g: (factor * g,))

    if kind == "log_scalar":
        (a,) = args
        _scalar(kind, a)
        x = a.scalar
        if not x > 0.0:
            raise LogDomainError(f"log of non-positive scalar {x!r}")
        return t._record(kind, (a,), np.log(a.value), lambda g: (g / x,))

    if kind == "frobenius_sq":
        (a,) = args
        av = a.value
        value = np.array([[np.sum(av * av)]])
        return t._record(kind, (a,), value, lambda g: (2.0 * g[0, 0] * av,))

    if kind == "l1_smooth":
        (a,) = args
        eps = float(params.get("eps", L1_SMOOTH_EPS))
        av = a.value
        root = np.sqrt(av * av + eps)
        value = np.array([[np.sum(root)]])
        return t._record(kind, (a,), value, lambda g: (g[0, 0] * av / root,))

    if kind == "sigmoid":
        (a,) = args
        s = logistic(a.value)
        return t._record(kind, (a,), s, lambda g: (g * s * (1.0 - s),))

    raise ValueError(f"Unknown elementwise kind {kind!r}; expected one of {ELEMENTWISE_KINDS}")


def logistic(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


def record_transpose(t: Tape, a: Var) -> Var:
    return t._record("transpose", (a,), a.value.T, lambda g: (g.T,))


def record_vstack(t: Tape, parts: Sequence[Var], cols: Optional[int] = None) -> Var:
    """Stack blocks vertically; an empty list gives a 0 x cols matrix."""
    if not parts:
        return t.constant(np.zeros((0, cols or 0)))
    width = parts[0].shape[1]
    for part in parts:
        if part.shape[1] != width:
            raise DimensionError(f"vstack: column counts {width} and {part.shape[1]} differ")
    bounds = np.cumsum([0] + [p.shape[0] for p in parts])

    def vjp(g):
        return tuple(g[bounds[i]:bounds[i + 1]] for i in range(len(parts)))

    return t._record("vstack", parts, np.vstack([p.value for p in parts]), vjp)


def record_pairwise_diff(t: Tape, p: Var) -> Var:
    """From a d x 1 column p, the d x d matrix Δ[u, v] = p_v − p_u."""
    if p.shape[1] != 1:
        raise DimensionError(f"pairwise_diff expects a column vector, got {p.shape}")
    col = p.value[:, 0]
    value = col[None, :] - col[:, None]

    def vjp(g):
        return ((g.sum(axis=0) - g.sum(axis=1))[:, None],)

    return t._record("pairwise_diff", (p,), value, vjp)


def record_column_scaling(t: Tape, w: Var) -> Var:
    """D = {I + diag(WᵀW)}⁻¹ as a dense diagonal matrix."""
    if w.shape[0] != w.shape[1]:
        raise DimensionError(f"column_scaling requires a square input, got {w.shape}")
    wv = w.value
    diag = 1.0 / (1.0 + np.sum(wv * wv, axis=0))

    def vjp(g):
        # ∂D_ii/∂w_ji = −2 w_ji D_ii²
        return (-2.0 * wv * (np.diag(g) * diag * diag)[None, :],)

    return t._record("column_scaling", (w,), np.diag(diag), vjp)


def record_acyclicity(t: Tape, w: Var) -> Var:
    """h(W) = Tr(e^{W∘W}) − d with gradient (e^{W∘W})ᵀ ∘ 2W."""
    if w.shape[0] != w.shape[1]:
        raise DimensionError(f"acyclicity requires a square input, got {w.shape}")
    wv = w.value
    expm = matrix_exponential(wv * wv)
    value = np.array([[np.trace(expm) - wv.shape[0]]])
    return t._record("acyclicity", (w,), value, lambda g: (g[0, 0] * expm.T * 2.0 * wv,))


def backward(t: Tape, root: Var) -> GradMap:
    """Single reverse sweep from a scalar root."""
    if root.shape != (1, 1):
        raise DimensionError(f"backward needs a scalar root, got shape {root.shape}")
    if not np.isfinite(root.scalar):
        raise NonFiniteError(f"backward from non-finite root value {root.scalar!r}")

    adjoints: Dict[int, np.ndarray] = {root.node: np.ones((1, 1))}
    for node_id in range(root.node, -1, -1):
        node = t.nodes[node_id]
        adjoint = adjoints.get(node_id)
        if adjoint is None or node.vjp is None:
            continue
        for input_id, contribution in zip(node.inputs, node.vjp(adjoint)):
            if contribution is None or t.nodes[input_id].kind == "constant":
                continue
            previous = adjoints.get(input_id)
            adjoints[input_id] = contribution if previous is None else previous + contribution
    return GradMap(adjoints)
