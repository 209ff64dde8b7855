"""Figures rendered from the plot-ready long-format CSVs."""

import logging
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

from src.errors import InputError

logger = logging.getLogger(__name__)

ABLATION_COLORS = {
    "none": "#2c7fb8",
    "no-dgpl": "#f39c12",
    "no-acml": "#e74c3c",
    "no-qmle": "#7f8c8d",
}

BENCH_METRICS = ("f1", "tpr", "shd")


def setup_style():
    sns.set_theme(style="whitegrid")
    plt.rcParams["figure.figsize"] = (10, 5)
    plt.rcParams["font.size"] = 12


def _save(fig, output_path: Path) -> Path:
    output_path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return output_path


def plot_bench_metric(long: pd.DataFrame, metric: str, output_path: Path) -> Path:
    """Bar chart of a metric per d, grouped by ablation, one panel per target."""
    setup_style()
    ok = long[long["status"] == "ok"]
    targets = sorted(ok["target"].dropna().unique())
    fig, axes = plt.subplots(1, len(targets), figsize=(6 * len(targets), 5), squeeze=False)
    for ax, target in zip(axes[0], targets):
        data = ok[ok["target"] == target]
        sns.barplot(
            data=data,
            x="d",
            y=metric,
            hue="ablation",
            palette=ABLATION_COLORS,
            errorbar="sd",
            ax=ax,
        )
        ax.set_title(f"{metric.upper()} ({target})")
        ax.set_xlabel("Number of variables d")
    return _save(fig, output_path)


def plot_rank_curve(long: pd.DataFrame, output_path: Path) -> Path:
    """Mean instantaneous TPR versus embedding dimension k, per rank ratio."""
    setup_style()
    data = long[(long["status"] == "ok") & (long["target"] == "instantaneous")]
    fig, ax = plt.subplots()
    sns.lineplot(data=data, x="k", y="tpr", hue="rank_ratio", marker="o", errorbar="sd", ax=ax)
    ax.set_xlabel("Embedding dimension k")
    ax.set_ylabel("Instantaneous TPR")
    ax.set_title("Recovery versus embedding dimension")
    return _save(fig, output_path)


def generate_all_graphs(long_csv: Path, output_dir: Path) -> List[Path]:
    """Render every figure the long CSV supports."""
    long_csv = Path(long_csv)
    if not long_csv.exists():
        raise InputError(f"No such results file: {long_csv}")
    long = pd.read_csv(long_csv)
    if "status" not in long or "target" not in long:
        raise InputError(f"{long_csv} is not a long-format results file")

    written = []
    if long["rank_ratio"].notna().any() and long["k"].notna().any():
        written.append(plot_rank_curve(long, output_dir / "rank_tpr_vs_k.png"))
    else:
        for metric in BENCH_METRICS:
            written.append(plot_bench_metric(long, metric, output_dir / f"bench_{metric}.png"))
    logger.info("Wrote %d figure(s) to %s", len(written), output_dir)
    return written
