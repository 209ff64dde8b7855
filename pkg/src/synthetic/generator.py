"""Synthetic structural VAR benchmark.

Instantaneous graphs are Erdős–Rényi DAGs (or planted-rank hub DAGs),
lagged graphs are Bernoulli supports, and series follow
X_t = X_t·W + Σ_k X_{t−k}·A_k + N_t, simulated as X_t = (Y·A + N_t)·S⁻¹.
"""

from dataclasses import asdict, dataclass, field
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import (
    DEFAULT_BURN_IN,
    DEFAULT_ETA,
    DEFAULT_LAG,
    DEFAULT_MEAN_DEGREE,
    DEFAULT_SIGMA,
    DEFAULT_T,
    INSTANTANEOUS_RANGES,
    LAGGED_RANGES,
    STABILITY_REDRAWS,
    STABILITY_RETRIES,
    STABILITY_SHRINK,
)
from src.errors import InfeasibleSpecError, InputError, UnstableSystemError
from src.linalg.core import inverse, lu_decompose, lu_solve

logger = logging.getLogger(__name__)

POWER_ITERATIONS = 200

Intervals = Sequence[Tuple[float, float]]


@dataclass(frozen=True)
class GraphSpec:
    """Ground-truth graph parameters."""
    d: int
    p: int = DEFAULT_LAG
    mean_degree: float = DEFAULT_MEAN_DEGREE
    lag_density: Optional[float] = None  # defaults to 1/d
    eta: float = DEFAULT_ETA
    seed: int = 0
    rank: Optional[int] = None

    def __post_init__(self):
        if self.d < 2:
            raise InputError(f"d must be >= 2, got {self.d}")
        if self.p < 0:
            raise InputError(f"lag order must be >= 0, got {self.p}")
        if self.mean_degree < 0:
            raise InputError(f"mean degree must be >= 0, got {self.mean_degree}")
        if not self.eta > 0:
            raise InputError(f"eta must be positive, got {self.eta}")
        if self.lag_density is not None and not 0.0 <= self.lag_density <= 1.0:
            raise InputError(f"lag density must lie in [0, 1], got {self.lag_density}")

    @property
    def effective_lag_density(self) -> float:
        return 1.0 / self.d if self.lag_density is None else self.lag_density


@dataclass(frozen=True)
class SeriesConfig:
    """Simulation length, burn-in and noise scale."""
    T: int = DEFAULT_T
    burn_in: int = DEFAULT_BURN_IN
    noise_std: float = DEFAULT_SIGMA
    seed: int = 0

    def __post_init__(self):
        if self.T < 1:
            raise InputError(f"T must be >= 1, got {self.T}")
        if self.burn_in < 0:
            raise InputError(f"burn-in must be >= 0, got {self.burn_in}")
        if self.noise_std < 0:
            raise InputError(f"noise std must be >= 0, got {self.noise_std}")


@dataclass
class GroundTruth:
    """Weighted matrices and their supports."""
    w_true: np.ndarray
    a_true: List[np.ndarray]
    lag_scale: float = 1.0
    stability: float = 0.0
    redraws: int = 0
    w_support: np.ndarray = field(init=False)
    a_support: List[np.ndarray] = field(init=False)

    def __post_init__(self):
        self.w_support = (self.w_true != 0).astype(np.float64)
        self.a_support = [(block != 0).astype(np.float64) for block in self.a_true]

    @property
    def d(self) -> int:
        return self.w_true.shape[0]

    @property
    def p(self) -> int:
        return len(self.a_true)

    def lagged_stack(self) -> np.ndarray:
        if not self.a_true:
            return np.zeros((0, self.d))
        return np.vstack(self.a_true)


def _uniform_union(rng: np.random.Generator, size: int, intervals: Intervals) -> np.ndarray:
    """Uniform draws over a union of disjoint intervals."""
    lows = np.array([lo for lo, _ in intervals])
    widths = np.array([hi - lo for lo, hi in intervals])
    which = rng.choice(len(intervals), size=size, p=widths / widths.sum())
    return lows[which] + widths[which] * rng.random(size)


def _edge_probability(d: int, mean_degree: float) -> float:
    pairs = d * (d - 1) / 2
    q = mean_degree * d / pairs
    if q > 1.0:
        raise InfeasibleSpecError(
            f"mean degree {mean_degree} needs {mean_degree * d:.0f} edges, a DAG on {d} nodes holds {pairs:.0f}"
        )
    return q


def sample_er_dag(d: int, mean_degree: float, rng: np.random.Generator) -> np.ndarray:
    """Erdős–Rényi DAG: random topological order, order-respecting pairs kept w.p. q."""
    q = _edge_probability(d, mean_degree)
    upper = np.triu(rng.random((d, d)) < q, k=1).astype(np.float64)
    order = rng.permutation(d)
    dag = np.zeros((d, d))
    dag[np.ix_(order, order)] = upper
    return dag


def sample_hub_dag(d: int, rank: int, mean_degree: float, rng: np.random.Generator) -> np.ndarray:
    """DAG whose edges all leave `rank` hub nodes, so its rank is at most `rank`.

    Hubs sit at random positions of a random topological order and link to
    later nodes; the link probability is chosen so the expected edge count
    is mean_degree·d.
    """
    if not 1 <= rank <= d - 1:
        raise InfeasibleSpecError(f"rank must lie in [1, {d - 1}], got {rank}")
    order = rng.permutation(d)
    positions = np.sort(rng.choice(d - 1, size=rank, replace=False))
    reachable = float(np.sum(d - 1 - positions))
    q = mean_degree * d / reachable
    if q > 1.0:
        raise InfeasibleSpecError(
            f"{rank} hubs can emit at most {reachable:.0f} edges, mean degree {mean_degree} needs {mean_degree * d:.0f}"
        )
    dag = np.zeros((d, d))
    for pos in positions:
        targets = order[pos + 1:][rng.random(d - 1 - pos) < q]
        dag[order[pos], targets] = 1.0
    return dag


def sample_instantaneous_weights(support: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Weights uniform on [−2, −0.5] ∪ [0.5, 2] over the support."""
    w = np.zeros_like(support, dtype=np.float64)
    rows, cols = np.nonzero(support)
    w[rows, cols] = _uniform_union(rng, rows.size, INSTANTANEOUS_RANGES)
    return w


def sample_lagged_weights(
    d: int,
    p: int,
    lag_density: float,
    eta: float,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    """A_1..A_p with Bernoulli off-diagonal supports.

    Lag k weights are uniform on [−1.0α, −0.25α] ∪ [0.25α, 2.0α], α = 1/eta**k.
    """
    if not 0.0 <= lag_density <= 1.0:
        raise InputError(f"lag density must lie in [0, 1], got {lag_density}")
    blocks = []
    off_diagonal = ~np.eye(d, dtype=bool)
    for k in range(1, p + 1):
        alpha = 1.0 / eta ** k
        support = (rng.random((d, d)) < lag_density) & off_diagonal
        block = np.zeros((d, d))
        rows, cols = np.nonzero(support)
        ranges = [(lo * alpha, hi * alpha) for lo, hi in LAGGED_RANGES]
        block[rows, cols] = _uniform_union(rng, rows.size, ranges)
        blocks.append(block)
    return blocks


def companion_matrix(a_true: Sequence[np.ndarray], w_true: np.ndarray) -> np.ndarray:
    """Row-convention companion matrix of the reduced-form VAR with B_k = A_k·S⁻¹."""
    d = w_true.shape[0]
    p = len(a_true)
    if p == 0:
        return np.zeros((0, 0))
    s_inv = inverse(np.eye(d) - w_true)
    companion = np.zeros((p * d, p * d))
    for k, block in enumerate(a_true):
        companion[k * d:(k + 1) * d, :d] = block @ s_inv
        if k + 1 < p:
            companion[k * d:(k + 1) * d, (k + 1) * d:(k + 2) * d] = np.eye(d)
    return companion


def stability_estimate(a_true: Sequence[np.ndarray], w_true: np.ndarray) -> float:
    """Power-iteration estimate of the companion spectral radius (advisory)."""
    companion = companion_matrix(a_true, w_true)
    if companion.size == 0 or not np.any(companion):
        return 0.0
    v = np.random.default_rng(0).normal(size=companion.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(POWER_ITERATIONS):
        nxt = companion @ v
        norm = float(np.linalg.norm(nxt))
        if norm == 0.0:
            return 0.0
        v = nxt / norm
    # two-step ratio damps sign flips of a negative dominant eigenvalue
    two_step = float(np.linalg.norm(companion @ (companion @ v)))
    return float(np.sqrt(two_step))


def sample_ground_truth(spec: GraphSpec) -> GroundTruth:
    """Draw W and A_1..A_p until the VAR is stable.

    An explosive draw first has its lags shrunk by STABILITY_SHRINK up to
    STABILITY_RETRIES times; if that is not enough, supports and weights
    are drawn afresh from the same generator, at most STABILITY_REDRAWS
    times.
    """
    rng = np.random.default_rng(spec.seed)
    radius = float("inf")
    for redraw in range(STABILITY_REDRAWS + 1):
        if spec.rank is not None:
            support = sample_hub_dag(spec.d, spec.rank, spec.mean_degree, rng)
        else:
            support = sample_er_dag(spec.d, spec.mean_degree, rng)
        w_true = sample_instantaneous_weights(support, rng)
        a_true = sample_lagged_weights(spec.d, spec.p, spec.effective_lag_density, spec.eta, rng)

        scale = 1.0
        radius = stability_estimate(a_true, w_true)
        for retry in range(STABILITY_RETRIES):
            if radius < 1.0:
                break
            logger.debug("Instance seed=%d has spectral radius %.3f, shrinking lags (retry %d)",
                         spec.seed, radius, retry + 1)
            scale *= STABILITY_SHRINK
            a_true = [block * STABILITY_SHRINK for block in a_true]
            radius = stability_estimate(a_true, w_true)
        if radius < 1.0:
            if redraw:
                logger.info("Instance seed=%d stable after %d redraws", spec.seed, redraw)
            return GroundTruth(w_true=w_true, a_true=a_true, lag_scale=scale, stability=radius, redraws=redraw)

    raise UnstableSystemError(
        f"instance seed={spec.seed} still explosive after {STABILITY_REDRAWS} redraws "
        f"(spectral radius estimate {radius:.3f})",
        spectral_radius=radius,
    )


def simulate_with_noise(
    gt: GroundTruth,
    cfg: SeriesConfig,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Simulate T rows after burn-in; also return the injected noise rows."""
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    d, p = gt.d, gt.p
    if cfg.T < p + 1:
        raise InputError(f"T={cfg.T} must exceed the lag order {p}")

    factors = lu_decompose((np.eye(d) - gt.w_true).T)
    a_stack = gt.lagged_stack()
    total = p + cfg.burn_in + cfg.T
    x = np.zeros((total, d))
    noise = rng.normal(0.0, cfg.noise_std, (total, d))
    x[:p] = noise[:p]

    for t in range(p, total):
        drive = noise[t].copy()
        if p:
            y = np.concatenate([x[t - k] for k in range(1, p + 1)])
            drive += y @ a_stack
        # x_t·S = drive  <=>  Sᵀ·x_tᵀ = driveᵀ
        x[t] = lu_solve(factors, drive[:, None])[:, 0]
        if not np.all(np.isfinite(x[t])):
            radius = stability_estimate(gt.a_true, gt.w_true)
            raise UnstableSystemError(
                f"simulation diverged at step {t} (spectral radius estimate {radius:.3f})",
                spectral_radius=radius,
            )
    return x[-cfg.T:], noise[-cfg.T:]


def simulate(gt: GroundTruth, cfg: SeriesConfig, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """T x d series following the structural VAR."""
    series, _ = simulate_with_noise(gt, cfg, rng)
    return series


def generate_instance(spec: GraphSpec, series_cfg: SeriesConfig) -> Tuple[GroundTruth, np.ndarray]:
    """Ground truth plus one simulated series."""
    gt = sample_ground_truth(spec)
    return gt, simulate(gt, series_cfg)


def instance_meta(spec: GraphSpec, series_cfg: SeriesConfig, gt: GroundTruth) -> Dict[str, Any]:
    """JSON-ready description of a generated instance."""
    return {
        "graph": {**asdict(spec), "lag_density": spec.effective_lag_density},
        "series": asdict(series_cfg),
        "lag_scale": gt.lag_scale,
        "stability_estimate": gt.stability,
        "redraws": gt.redraws,
        "n_edges_instantaneous": int(gt.w_support.sum()),
        "n_edges_lagged": [int(block.sum()) for block in gt.a_support],
    }
