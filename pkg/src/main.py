"""localdbn CLI: generate, fit, evaluate and benchmark local DBN structure learning."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from src import __version__
from src.benchmark.cell import planted_rank
from src.benchmark.conditions import get_condition_config, parse_ablation
from src.benchmark.orchestrator import build_grid, run_grid
from src.config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_BENCH_DS,
    DEFAULT_BENCH_SEEDS,
    DEFAULT_BURN_IN,
    DEFAULT_D,
    DEFAULT_EPOCHS,
    DEFAULT_ETA,
    DEFAULT_JOBS,
    DEFAULT_LAG,
    DEFAULT_LAMBDA1,
    DEFAULT_LAMBDA2,
    DEFAULT_LR,
    DEFAULT_MEAN_DEGREE,
    DEFAULT_OMEGA,
    DEFAULT_RANK_KS,
    DEFAULT_RANK_RATIOS,
    DEFAULT_SEED,
    DEFAULT_SIGMA,
    DEFAULT_T,
    DEFAULT_TARGET_TPR,
    DEFAULT_TAU,
    DEFAULT_TAU_FINAL,
    DEFAULT_THRESHOLD,
    OUTPUTS_DIR,
    resolve_settings,
)
from src.errors import InputError, LocalDBNError
from src.evaluation.metrics import evaluate_graphs
from src.model.acml import MaskConfig, MaskMode
from src.model.objective import LossConfig
from src.output.csv_writer import write_long_csv, write_rank_summary_csv, write_stats_csv, write_summary_csv
from src.output.graphs import generate_all_graphs
from src.output.io import (
    GraphSet,
    check_compatible,
    load_graphs,
    read_series,
    write_json,
    write_loss_history,
    write_matrix,
    write_series,
)
from src.output.report import REPORT_NAME, LossTrace, RunReport
from src.output.traces import counts_line, loss_summary, metrics_table, write_summary_trace
from src.synthetic.generator import GraphSpec, SeriesConfig, generate_instance, instance_meta
from src.training.dataset import TimeSeriesDataset
from src.training.trainer import FitResult, TrainConfig, fit

logger = logging.getLogger(__name__)

INSTANCE_DEFAULTS: Dict[str, Any] = {
    "p": DEFAULT_LAG,
    "t": DEFAULT_T,
    "density": DEFAULT_MEAN_DEGREE,
    "lag_density": None,
    "eta": DEFAULT_ETA,
    "sigma": DEFAULT_SIGMA,
}

TRAIN_DEFAULTS: Dict[str, Any] = {
    "p": DEFAULT_LAG,
    "k": None,
    "lambda1": DEFAULT_LAMBDA1,
    "lambda2": DEFAULT_LAMBDA2,
    "lr": DEFAULT_LR,
    "epochs": DEFAULT_EPOCHS,
    "batch": DEFAULT_BATCH_SIZE,
    "threshold": DEFAULT_THRESHOLD,
    "tau": DEFAULT_TAU,
    "tau_final": DEFAULT_TAU_FINAL,
    "omega": DEFAULT_OMEGA,
    "mask_mode": MaskMode.STOCHASTIC.value,
    "center": True,
    "scaled_qmle": False,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_instance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, help=f"Lag order (default {DEFAULT_LAG})")
    parser.add_argument("--T", dest="t", type=int, help=f"Series length (default {DEFAULT_T})")
    parser.add_argument("--density", type=float, help=f"Mean degree of W (default {DEFAULT_MEAN_DEGREE})")
    parser.add_argument("--lag-density", type=float, help="Edge probability per lag block (default 1/d)")
    parser.add_argument("--eta", type=float, help=f"Lag decay base (default {DEFAULT_ETA})")
    parser.add_argument("--sigma", type=float, help=f"Noise standard deviation (default {DEFAULT_SIGMA})")


def _add_train_flags(parser: argparse.ArgumentParser, with_k: bool = True) -> None:
    if with_k:
        parser.add_argument("--k", type=int, help="Embedding dimension (default round(2d/5))")
    parser.add_argument("--lambda1", type=float, help=f"Acyclicity weight without the mask (default {DEFAULT_LAMBDA1})")
    parser.add_argument("--lambda2", type=float, help=f"Sparsity weight (default {DEFAULT_LAMBDA2})")
    parser.add_argument("--lr", type=float, help=f"Adam learning rate (default {DEFAULT_LR})")
    parser.add_argument("--epochs", type=int, help=f"Training epochs (default {DEFAULT_EPOCHS})")
    parser.add_argument("--batch", type=int, help=f"Mini-batch size (default {DEFAULT_BATCH_SIZE})")
    parser.add_argument("--threshold", type=float, help=f"Binarisation threshold (default {DEFAULT_THRESHOLD})")
    parser.add_argument("--tau", type=float, help=f"Initial mask temperature (default {DEFAULT_TAU})")
    parser.add_argument("--tau-final", type=float, help=f"Final mask temperature (default {DEFAULT_TAU_FINAL})")
    parser.add_argument("--omega", type=float, help=f"Orientation threshold (default {DEFAULT_OMEGA})")
    parser.add_argument("--mask-mode", choices=[m.value for m in MaskMode if m is not MaskMode.HARD],
                        help="Mask used during training (default stochastic)")
    parser.add_argument("--no-center", dest="center", action="store_const", const=False,
                        help="Do not column-centre the series")
    parser.add_argument("--scaled-qmle", dest="scaled_qmle", action="store_const", const=True,
                        help="Fit the D·Sᵀ-scaled residual in the QMLE score")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="dotenv-style KEY=VALUE settings file")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    common.add_argument("--progress", action="store_true", help="Show progress bars")

    parser = argparse.ArgumentParser(
        prog="localdbn",
        description="Local dynamic Bayesian network structure learning from time series",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    gen = subparsers.add_parser("generate", parents=[common], help="Generate a synthetic instance")
    gen.add_argument("--d", type=int, help=f"Number of variables (default {DEFAULT_D})")
    _add_instance_flags(gen)
    gen.add_argument("--rank", type=int, help="Plant a hub graph with this many hubs")
    gen.add_argument("--burn-in", type=int, help=f"Discarded warm-up steps (default {DEFAULT_BURN_IN})")
    gen.add_argument("--seed", type=int, help=f"Random seed (default {DEFAULT_SEED})")
    gen.add_argument("--out", type=Path, default=OUTPUTS_DIR / "instance", help="Output directory")

    fit_parser = subparsers.add_parser("fit", parents=[common], help="Fit a model to a series file")
    fit_parser.add_argument("--series", type=Path, required=True, help="series.csv or a directory holding it")
    fit_parser.add_argument("--p", type=int, help=f"Lag order (default {DEFAULT_LAG})")
    _add_train_flags(fit_parser)
    fit_parser.add_argument("--seed", type=int, help=f"Random seed (default {DEFAULT_SEED})")
    fit_parser.add_argument("--ablation", help="none, no-dgpl, no-acml or no-qmle (default none)")
    fit_parser.add_argument("--truth", type=Path, help="Ground-truth directory to evaluate against")
    fit_parser.add_argument("--out", type=Path, default=OUTPUTS_DIR / "fit", help="Output directory")

    ev = subparsers.add_parser("eval", parents=[common], help="Evaluate estimated graphs against a truth")
    ev.add_argument("--est", type=Path, required=True, help="Directory with W_est.csv (or W_true.csv)")
    ev.add_argument("--truth", type=Path, required=True, help="Directory with W_true.csv")
    ev.add_argument("--out", type=Path, help="Where report.json goes (default: the --est directory)")

    bench = subparsers.add_parser("bench", parents=[common], help="Run a benchmark grid")
    bench.add_argument("--d", type=int, nargs="+", help=f"Variable counts (default {DEFAULT_BENCH_DS})")
    bench.add_argument("--seeds", type=int, nargs="+", help=f"Seeds per cell (default {DEFAULT_BENCH_SEEDS})")
    bench.add_argument("--ablation", nargs="+", help="Ablations to run (default none)")
    _add_instance_flags(bench)
    _add_train_flags(bench)
    bench.add_argument("--jobs", type=int, help="Cells run concurrently (default 1)")
    bench.add_argument("--out", type=Path, default=OUTPUTS_DIR / "bench", help="Output directory")

    rank = subparsers.add_parser("rank", parents=[common], help="Recovery versus embedding dimension")
    rank.add_argument("--d", type=int, help=f"Number of variables (default {DEFAULT_D})")
    rank.add_argument("--rank-ratios", type=float, nargs="+", help=f"Planted rank / d (default {DEFAULT_RANK_RATIOS})")
    rank.add_argument("--k", type=int, nargs="+", help=f"Embedding dimensions (default {DEFAULT_RANK_KS})")
    rank.add_argument("--seeds", type=int, nargs="+", help=f"Seeds per cell (default {DEFAULT_BENCH_SEEDS})")
    rank.add_argument("--target-tpr", type=float, help=f"TPR the minimum k must reach (default {DEFAULT_TARGET_TPR})")
    _add_instance_flags(rank)
    _add_train_flags(rank, with_k=False)
    rank.add_argument("--jobs", type=int, help="Cells run concurrently (default 1)")
    rank.add_argument("--out", type=Path, default=OUTPUTS_DIR / "rank", help="Output directory")

    plot = subparsers.add_parser("plot", parents=[common], help="Render figures from a long-format CSV")
    plot.add_argument("--input", type=Path, required=True, help="bench_long.csv or rank_long.csv")
    plot.add_argument("--out", type=Path, help="Figure directory (default: next to the input)")

    return parser


# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------

def _settings(args: argparse.Namespace, defaults: Dict[str, Any]) -> Dict[str, Any]:
    return resolve_settings(vars(args), defaults, args.config)


def _train_config(s: Dict[str, Any], seed: int, progress: bool, ablation: str = "none") -> TrainConfig:
    try:
        mode = MaskMode(s["mask_mode"])
    except ValueError:
        raise InputError(f"unknown mask mode {s['mask_mode']!r}") from None
    k = s.get("k")
    cfg = TrainConfig(
        epochs=s["epochs"],
        batch_size=s["batch"],
        lr=s["lr"],
        seed=seed,
        threshold=s["threshold"],
        loss=LossConfig(lambda2=s["lambda2"], scaled=s["scaled_qmle"]),
        mask=MaskConfig(omega=s["omega"], tau=s["tau"], mode=mode),
        embed_dim=k if isinstance(k, int) else None,
        tau_final=s["tau_final"],
        center=s["center"],
        progress=progress,
    )
    return get_condition_config(parse_ablation(ablation)).apply(cfg, lambda1=s["lambda1"])


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_generate(args: argparse.Namespace) -> int:
    s = _settings(args, {
        "d": DEFAULT_D, **INSTANCE_DEFAULTS, "rank": None, "burn_in": DEFAULT_BURN_IN, "seed": DEFAULT_SEED,
    })
    spec = GraphSpec(
        d=s["d"], p=s["p"], mean_degree=s["density"], lag_density=s["lag_density"],
        eta=s["eta"], seed=s["seed"], rank=s["rank"],
    )
    series_cfg = SeriesConfig(T=s["t"], burn_in=s["burn_in"], noise_std=s["sigma"], seed=s["seed"])
    gt, series = generate_instance(spec, series_cfg)

    out: Path = args.out
    write_series([series], out / "series.csv")
    write_matrix(gt.w_true, out / "W_true.csv")
    for k, block in enumerate(gt.a_true, start=1):
        write_matrix(block, out / f"A{k}_true.csv")
    write_json(instance_meta(spec, series_cfg, gt), out / "meta.json")

    print(f"Wrote instance d={spec.d} p={spec.p} T={series_cfg.T} to {out}")
    print(f"  instantaneous edges: {int(gt.w_support.sum())}, lagged edges: {[int(a.sum()) for a in gt.a_support]}")
    return 0


def _fit_graphs(result: FitResult, out: Path) -> GraphSet:
    sources = {"W": out / "W_est.csv"}
    sources.update({f"A{k}": out / f"A{k}_est.csv" for k in range(1, result.lag_order + 1)})
    return GraphSet(result.w_weighted, result.w_binary, result.a_weighted, result.a_binary, sources)


def write_fit_artifacts(result: FitResult, out: Path) -> None:
    write_matrix(result.w_weighted, out / "W_est.csv")
    write_matrix(result.w_binary, out / "W_est_binary.csv")
    for k, (weighted, binary) in enumerate(zip(result.a_weighted, result.a_binary), start=1):
        write_matrix(weighted, out / f"A{k}_est.csv")
        write_matrix(binary, out / f"A{k}_est_binary.csv")
    if result.p_final is not None:
        write_matrix(np.asarray(result.p_final.values).reshape(1, -1), out / "p_est.csv")
    write_loss_history(result.loss_history, out / "loss_history.csv")


def _print_metrics(metrics) -> None:
    print(metrics_table(metrics))
    print(counts_line("instantaneous", metrics.instantaneous))
    if metrics.lagged is not None:
        print(counts_line("lagged", metrics.lagged))


def cmd_fit(args: argparse.Namespace) -> int:
    s = _settings(args, {**TRAIN_DEFAULTS, "seed": DEFAULT_SEED, "ablation": "none"})
    cfg = _train_config(s, seed=s["seed"], progress=args.progress, ablation=s["ablation"])

    series_path: Path = args.series / "series.csv" if args.series.is_dir() else args.series
    series, names = read_series(series_path)
    dataset = TimeSeriesDataset.from_series(series, s["p"], names, center=cfg.center)
    logger.info("Fitting %d samples of %d variables, lag %d", dataset.n, dataset.d, dataset.lag)
    result = fit(dataset, cfg)

    out: Path = args.out
    write_fit_artifacts(result, out)
    trace = LossTrace.from_history(result.loss_history, result.epochs_run, result.aborted, result.abort_reason)
    report = RunReport(
        command="fit",
        seed=cfg.seed,
        config={
            "series": str(series_path),
            "p": s["p"],
            "ablation": s["ablation"],
            "embed_dim": result.embed_dim,
            "train": cfg.to_dict(),
        },
        loss_trace=trace,
        wall_time_seconds=result.wall_time_seconds,
    )

    if args.truth is not None:
        truth = load_graphs(args.truth)
        estimate = _fit_graphs(result, out)
        check_compatible(estimate, truth)
        metrics = evaluate_graphs(
            estimate.w_binary, estimate.w_scores, truth.w_binary,
            estimate.a_binary, estimate.a_scores, truth.a_binary,
        )
        report.set_metrics(metrics)
        _print_metrics(metrics)

    report.save(out)
    print(loss_summary(trace))
    print(f"Wrote estimates to {out}")
    if result.aborted:
        logger.error("Training aborted: %s", result.abort_reason)
        return 3
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    estimate = load_graphs(args.est)
    truth = load_graphs(args.truth)
    check_compatible(estimate, truth)
    metrics = evaluate_graphs(
        estimate.w_binary, estimate.w_scores, truth.w_binary,
        estimate.a_binary, estimate.a_scores, truth.a_binary,
    )

    out: Path = args.out or args.est
    if (out / REPORT_NAME).exists():
        report = RunReport.load(out)
    else:
        report = RunReport(command="eval", config={"est": str(args.est), "truth": str(args.truth)})
    report.set_metrics(metrics)
    report.save(out)

    _print_metrics(metrics)
    return 0


def _grid_settings(args: argparse.Namespace, extra: Dict[str, Any]) -> Dict[str, Any]:
    return _settings(args, {**INSTANCE_DEFAULTS, **TRAIN_DEFAULTS, "seeds": list(DEFAULT_BENCH_SEEDS),
                            "jobs": DEFAULT_JOBS, **extra})


def _instance_kwargs(s: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "p": s["p"],
        "T": s["t"],
        "mean_degree": s["density"],
        "lag_density": s["lag_density"],
        "eta": s["eta"],
        "sigma": s["sigma"],
    }


def cmd_bench(args: argparse.Namespace) -> int:
    s = _grid_settings(args, {"d": list(DEFAULT_BENCH_DS), "ablation": ["none"]})
    ablations = [parse_ablation(name) for name in s["ablation"]]
    train = _train_config(s, seed=DEFAULT_SEED, progress=False)
    out: Path = args.out
    cells = build_grid(
        ds=s["d"], seeds=s["seeds"], train=train, ablations=ablations,
        out_dir=out / "cells", **_instance_kwargs(s),
    )
    logger.info("Running %d cells with %d job(s)", len(cells), s["jobs"])
    results = run_grid(cells, jobs=s["jobs"], progress=args.progress, desc="bench")

    long = write_long_csv(results, out / "bench_long.csv")
    table = write_summary_csv(long, out / "bench_summary.csv")
    write_stats_csv(long, out / "bench_stats.csv")
    write_summary_trace(table, out / "bench_summary.txt")

    print(table.to_string(index=False) if not table.empty else "No successful cells.")
    failed = [r for r in results if r.status != "ok"]
    if failed:
        print(f"{len(failed)} of {len(results)} cells failed; see bench_long.csv")
    print(f"Results written to {out}")
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    s = _grid_settings(args, {
        "d": DEFAULT_D,
        "rank_ratios": list(DEFAULT_RANK_RATIOS),
        "k": list(DEFAULT_RANK_KS),
        "target_tpr": DEFAULT_TARGET_TPR,
    })
    d = s["d"]
    bad = [k for k in s["k"] if not 1 <= k <= d]
    if bad:
        raise InputError(f"embedding dimensions must lie in [1, {d}], got {bad}")
    for ratio in s["rank_ratios"]:
        planted_rank(d, ratio)

    train = _train_config({**s, "k": None}, seed=DEFAULT_SEED, progress=False)
    out: Path = args.out
    cells = build_grid(
        ds=[d], seeds=s["seeds"], train=train, rank_ratios=s["rank_ratios"], ks=s["k"],
        out_dir=out / "cells", **_instance_kwargs(s),
    )
    results = run_grid(cells, jobs=s["jobs"], progress=args.progress, desc="rank")

    long = write_long_csv(results, out / "rank_long.csv")
    summary = write_rank_summary_csv(long, s["target_tpr"], out / "rank_summary.csv")
    print(summary.to_string(index=False) if not summary.empty else "No successful cells.")
    print(f"Results written to {out}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    out = args.out or args.input.parent / "figures"
    for path in generate_all_graphs(args.input, out):
        print(f"Wrote {path}")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "fit": cmd_fit,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "rank": cmd_rank,
    "plot": cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except LocalDBNError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
