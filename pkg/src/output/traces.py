"""Human-readable text output: metric tables and loss summaries."""

from pathlib import Path
from typing import Optional

import pandas as pd

from src.evaluation.metrics import GraphMetrics, TargetMetrics
from src.output.report import LossTrace

METRIC_ORDER = ("tpr", "precision", "f1", "shd", "auroc", "auprc")


def _cell(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, int):
        return str(value)
    return f"{value:.4f}"


def metrics_table(metrics: GraphMetrics) -> str:
    """Fixed-width table, one row per target."""
    targets = [("instantaneous", metrics.instantaneous), ("lagged", metrics.lagged)]
    lines = [f"{'target':<14}" + "".join(f"{name:>11}" for name in METRIC_ORDER)]
    for name, target in targets:
        if target is None:
            continue
        lines.append(f"{name:<14}" + "".join(f"{_cell(getattr(target, m)):>11}" for m in METRIC_ORDER))
    return "\n".join(lines)


def counts_line(name: str, target: Optional[TargetMetrics]) -> str:
    if target is None:
        return f"{name}: no lags"
    return f"{name}: TP={target.tp} FP={target.fp} FN={target.fn} TN={target.tn}"


def loss_summary(trace: LossTrace) -> str:
    lines = [f"Epochs run: {trace.epochs_run}"]
    for label, value in (("first", trace.first), ("last", trace.last), ("best", trace.best)):
        if value is not None:
            lines.append(
                f"  {label:<5} total={value.total:.6g} data={value.data_term:.6g} "
                f"logdet={value.logdet_term:.6g} sparsity={value.sparsity_term:.6g} "
                f"acyclicity={value.acyclicity_term:.6g}"
            )
    if trace.aborted:
        lines.append(f"  aborted: {trace.abort_reason}")
    return "\n".join(lines)


def write_summary_trace(table: pd.DataFrame, output_path: Path, title: str = "Benchmark Summary") -> None:
    """Markdown-ish summary of a bench table."""
    lines = [f"# {title}", ""]
    if table.empty:
        lines.append("No successful cells.")
    else:
        lines.append(table.to_string(index=False))
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
