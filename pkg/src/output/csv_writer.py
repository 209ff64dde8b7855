"""CSV output for benchmark and rank-study results."""

from pathlib import Path
from typing import Iterable

import pandas as pd

from src.benchmark.cell import CellResult
from src.benchmark.metrics import long_frame, rank_summary, summarize, table_layout

LONG_COLUMNS = [
    "d", "p", "T", "seed", "ablation", "rank_ratio", "k", "target", "status",
    "tpr", "precision", "f1", "shd", "auroc", "auprc",
    "epochs_run", "aborted", "wall_time_seconds", "error",
]


def _write(frame: pd.DataFrame, output_path: Path) -> None:
    output_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output_path, index=False, lineterminator="\n")


def write_long_csv(results: Iterable[CellResult], output_path: Path) -> pd.DataFrame:
    """Plot-ready rows, one per (cell, target)."""
    frame = long_frame(results).reindex(columns=LONG_COLUMNS)
    _write(frame, output_path)
    return frame


def write_summary_csv(long: pd.DataFrame, output_path: Path) -> pd.DataFrame:
    """Mean±std per (d, ablation) in the inst/lagged table layout."""
    table = table_layout(summarize(long))
    _write(table, output_path)
    return table


def write_stats_csv(long: pd.DataFrame, output_path: Path) -> pd.DataFrame:
    """Numeric mean/std columns behind the summary table."""
    stats = summarize(long)
    _write(stats, output_path)
    return stats


def write_rank_summary_csv(long: pd.DataFrame, target_tpr: float, output_path: Path) -> pd.DataFrame:
    summary = rank_summary(long, target_tpr)
    _write(summary, output_path)
    return summary
