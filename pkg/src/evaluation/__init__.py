"""Graph evaluation: recovery metrics and DAG helpers."""

from src.evaluation.dag import break_cycles, is_acyclic, to_digraph
from src.evaluation.metrics import (
    Confusion,
    GraphMetrics,
    RecoveryScores,
    TargetMetrics,
    auprc,
    auprc_pairs,
    auroc,
    auroc_pairs,
    confusion,
    directed_shd,
    evaluate_graphs,
    evaluate_lagged,
    evaluate_target,
    off_diagonal_pairs,
    roc_sweep,
    roc_sweep_pairs,
    shd,
    tpr_f1,
)

__all__ = [
    "Confusion",
    "GraphMetrics",
    "RecoveryScores",
    "TargetMetrics",
    "auprc",
    "auprc_pairs",
    "auroc",
    "auroc_pairs",
    "break_cycles",
    "confusion",
    "directed_shd",
    "evaluate_graphs",
    "evaluate_lagged",
    "evaluate_target",
    "is_acyclic",
    "off_diagonal_pairs",
    "roc_sweep",
    "roc_sweep_pairs",
    "shd",
    "to_digraph",
    "tpr_f1",
]
