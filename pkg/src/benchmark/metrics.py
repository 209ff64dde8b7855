"""Aggregation of cell results into long-format and summary tables."""

from typing import Iterable, Sequence

import pandas as pd

from src.benchmark.cell import METRIC_NAMES, CellResult

GROUP_KEYS = ["d", "p", "T", "ablation", "target"]
TARGET_PREFIX = {"instantaneous": "inst", "lagged": "lag"}


def long_frame(results: Iterable[CellResult]) -> pd.DataFrame:
    """One row per (cell, target); failed cells keep a single row."""
    rows = [row for result in results for row in result.rows()]
    frame = pd.DataFrame(rows)
    for name in METRIC_NAMES:
        if name in frame:
            frame[name] = pd.to_numeric(frame[name], errors="coerce")
    return frame


def summarize(long: pd.DataFrame, keys: Sequence[str] = GROUP_KEYS) -> pd.DataFrame:
    """Mean and population std (ddof=0) of every metric over seeds.

    Columns are ``<metric>_mean``/``<metric>_std`` plus ``n_runs``.
    """
    ok = long[long["status"] == "ok"]
    if ok.empty:
        return pd.DataFrame(columns=list(keys) + ["n_runs"])
    grouped = ok.groupby(list(keys), dropna=False, sort=True)
    columns = list(METRIC_NAMES)
    stats = grouped[columns].mean().add_suffix("_mean").join(grouped[columns].std(ddof=0).add_suffix("_std"))
    stats["n_runs"] = grouped.size()
    return stats.reset_index()


def failure_counts(long: pd.DataFrame, keys: Sequence[str] = ("d", "ablation")) -> pd.DataFrame:
    failed = long[long["status"] != "ok"]
    return failed.groupby(list(keys)).size().rename("n_failed").reset_index()


def _pm(mean: float, std: float, digits: int = 2) -> str:
    if pd.isna(mean):
        return ""
    return f"{mean:.{digits}f}±{std:.{digits}f}"


def table_layout(summary: pd.DataFrame, digits: int = 2) -> pd.DataFrame:
    """One row per (d, ablation) with inst_/lag_ metric columns as mean±std."""
    if summary.empty:
        return pd.DataFrame(columns=["d", "ablation"])
    rows = []
    for (d, ablation), group in summary.groupby(["d", "ablation"], sort=True):
        row = {"d": d, "ablation": ablation}
        for _, record in group.iterrows():
            prefix = TARGET_PREFIX.get(record["target"], record["target"])
            for metric in ("tpr", "shd", "f1", "auroc", "auprc"):
                row[f"{prefix}_{metric}"] = _pm(record[f"{metric}_mean"], record[f"{metric}_std"], digits)
            row["n_runs"] = int(record["n_runs"])
        rows.append(row)
    return pd.DataFrame(rows)


def rank_summary(long: pd.DataFrame, target_tpr: float) -> pd.DataFrame:
    """Per rank ratio, the smallest k whose mean instantaneous TPR reaches target_tpr."""
    ok = long[(long["status"] == "ok") & (long["target"] == "instantaneous")]
    ok = ok.dropna(subset=["rank_ratio", "k"])
    rows = []
    for ratio, group in ok.groupby("rank_ratio", sort=True):
        mean_tpr = group.groupby("k")["tpr"].mean().sort_index()
        reaching = mean_tpr[mean_tpr >= target_tpr]
        rows.append({
            "rank_ratio": ratio,
            "d": int(group["d"].iloc[0]),
            "min_k": int(reaching.index[0]) if not reaching.empty else None,
            "best_k": int(mean_tpr.idxmax()),
            "best_tpr": float(mean_tpr.max()),
            "target_tpr": target_tpr,
        })
    return pd.DataFrame(rows, columns=["rank_ratio", "d", "min_k", "best_k", "best_tpr", "target_tpr"])

