"""One benchmark grid cell: generate, fit and evaluate in-process."""

import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.benchmark.conditions import Ablation, get_condition_config
from src.config import DEFAULT_ETA, DEFAULT_LAG, DEFAULT_MEAN_DEGREE, DEFAULT_SIGMA, DEFAULT_T
from src.errors import InfeasibleSpecError
from src.evaluation.metrics import GraphMetrics, evaluate_graphs
from src.output.report import LossTrace, RunReport
from src.synthetic.generator import GraphSpec, SeriesConfig, generate_instance
from src.training.dataset import TimeSeriesDataset
from src.training.trainer import TrainConfig, fit

logger = logging.getLogger(__name__)

METRIC_NAMES = ("tpr", "precision", "f1", "shd", "auroc", "auprc")


def planted_rank(d: int, ratio: float) -> int:
    """Hub count for a rank ratio, kept within [1, d − 1]."""
    if not 0 < ratio <= 1:
        raise InfeasibleSpecError(f"rank ratio must be in (0, 1], got {ratio}")
    return min(max(1, round(ratio * d)), d - 1)


@dataclass(frozen=True)
class CellSpec:
    """Inputs of a single grid cell; picklable for worker processes."""
    d: int
    seed: int
    train: TrainConfig
    ablation: Ablation = Ablation.NONE
    p: int = DEFAULT_LAG
    T: int = DEFAULT_T
    mean_degree: float = DEFAULT_MEAN_DEGREE
    lag_density: Optional[float] = None
    eta: float = DEFAULT_ETA
    sigma: float = DEFAULT_SIGMA
    rank_ratio: Optional[float] = None
    k: Optional[int] = None
    out_dir: Optional[Path] = None

    @property
    def name(self) -> str:
        parts = [f"d{self.d}", self.ablation.value, f"seed{self.seed}"]
        if self.rank_ratio is not None:
            parts.insert(1, f"r{self.rank_ratio:g}")
        if self.k is not None:
            parts.insert(-1, f"k{self.k}")
        return "_".join(parts)

    def labels(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "p": self.p,
            "T": self.T,
            "seed": self.seed,
            "ablation": self.ablation.value,
            "rank_ratio": self.rank_ratio,
            "k": self.k,
        }


@dataclass
class CellResult:
    """Outcome of a cell; failed cells carry the error instead of metrics."""
    spec: CellSpec
    status: str
    metrics: Optional[GraphMetrics] = None
    error: Optional[str] = None
    wall_time_seconds: float = 0.0
    epochs_run: int = 0
    aborted: bool = False

    @classmethod
    def failed(cls, spec: CellSpec, error: str) -> "CellResult":
        return cls(spec=spec, status="failed", error=error)

    def rows(self) -> List[Dict[str, Any]]:
        """Long-format rows: one per evaluated target, or one failure row."""
        base = {
            **self.spec.labels(),
            "status": self.status,
            "error": self.error or "",
            "wall_time_seconds": self.wall_time_seconds,
            "epochs_run": self.epochs_run,
            "aborted": self.aborted,
        }
        if self.metrics is None:
            return [{**base, "target": "", **{m: None for m in METRIC_NAMES}}]
        rows = []
        for target, values in self.metrics.to_dict().items():
            if values is None:
                continue
            rows.append({**base, "target": target, **{m: values[m] for m in METRIC_NAMES}})
        return rows


def run_cell(spec: CellSpec) -> CellResult:
    """Run one cell; any exception becomes a failed result."""
    started = time.perf_counter()
    try:
        graph_spec = GraphSpec(
            d=spec.d,
            p=spec.p,
            mean_degree=spec.mean_degree,
            lag_density=spec.lag_density,
            eta=spec.eta,
            seed=spec.seed,
            rank=planted_rank(spec.d, spec.rank_ratio) if spec.rank_ratio is not None else None,
        )
        series_cfg = SeriesConfig(T=spec.T, noise_std=spec.sigma, seed=spec.seed)
        gt, series = generate_instance(graph_spec, series_cfg)

        cfg = get_condition_config(spec.ablation).apply(spec.train)
        cfg = replace(cfg, seed=spec.seed, embed_dim=spec.k if spec.k is not None else cfg.embed_dim)
        dataset = TimeSeriesDataset.from_series([series], spec.p, center=cfg.center)
        result = fit(dataset, cfg)
        metrics = evaluate_graphs(
            result.w_binary, result.w_scores, gt.w_support,
            result.a_binary, result.a_scores, gt.a_support,
        )
    except Exception as exc:
        logger.error("Cell %s failed: %s", spec.name, exc)
        outcome = CellResult.failed(spec, f"{type(exc).__name__}: {exc}")
        outcome.wall_time_seconds = time.perf_counter() - started
        return outcome

    if spec.out_dir is not None:
        report = RunReport(
            command="bench",
            seed=spec.seed,
            config={**spec.labels(), "train": cfg.to_dict()},
            loss_trace=LossTrace.from_history(
                result.loss_history, result.epochs_run, result.aborted, result.abort_reason
            ),
            wall_time_seconds=result.wall_time_seconds,
        )
        report.set_metrics(metrics)
        report.save(Path(spec.out_dir) / spec.name)

    return CellResult(
        spec=spec,
        status="ok",
        metrics=metrics,
        wall_time_seconds=time.perf_counter() - started,
        epochs_run=result.epochs_run,
        aborted=result.aborted,
    )
