"""Graph-recovery metrics: TPR, precision, F1, SHD, AUROC, AUPRC.

Binary graphs and score matrices are d x d arrays with u -> v at [u, v].
Every count runs over ordered off-diagonal pairs.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.errors import DimensionError, UndefinedMetricError


@dataclass(frozen=True)
class Confusion:
    """Directed-edge confusion counts."""
    tp: int
    fp: int
    fn: int
    tn: int

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class RecoveryScores:
    tpr: float
    precision: float
    f1: float


@dataclass
class TargetMetrics:
    """All metrics for one target: the instantaneous graph or the pooled lags."""
    tpr: float
    precision: float
    f1: float
    shd: int
    auroc: Optional[float]
    auprc: Optional[float]
    tp: int
    fp: int
    fn: int
    tn: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TargetMetrics":
        return cls(**{name: data.get(name) for name in cls.__dataclass_fields__})


@dataclass
class GraphMetrics:
    instantaneous: TargetMetrics
    lagged: Optional[TargetMetrics]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instantaneous": self.instantaneous.to_dict(),
            "lagged": self.lagged.to_dict() if self.lagged is not None else None,
        }


def _check_pair(est: np.ndarray, truth: np.ndarray) -> None:
    if est.ndim != 2 or est.shape != truth.shape or est.shape[0] != est.shape[1]:
        raise DimensionError(f"graphs must be square and of equal shape, got {est.shape} and {truth.shape}")


def off_diagonal_pairs(scores: np.ndarray, truth: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Flatten (score, label) over ordered off-diagonal pairs."""
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    _check_pair(scores, truth)
    keep = ~np.eye(scores.shape[0], dtype=bool)
    return scores[keep], truth[keep] != 0


def confusion(est: np.ndarray, truth: np.ndarray) -> Confusion:
    """TP/FP/FN/TN over ordered off-diagonal pairs."""
    e, t = off_diagonal_pairs(np.asarray(est) != 0, truth)
    e = e != 0
    return Confusion(
        tp=int(np.sum(e & t)),
        fp=int(np.sum(e & ~t)),
        fn=int(np.sum(~e & t)),
        tn=int(np.sum(~e & ~t)),
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def tpr_f1(conf: Confusion) -> RecoveryScores:
    """TPR, precision and F1, with 0/0 read as 0."""
    tpr = _ratio(conf.tp, conf.tp + conf.fn)
    precision = _ratio(conf.tp, conf.tp + conf.fp)
    return RecoveryScores(tpr=tpr, precision=precision, f1=_ratio(2 * precision * tpr, precision + tpr))


def shd(est: np.ndarray, truth: np.ndarray) -> int:
    """Structural Hamming distance over unordered pairs.

    A pair counts once when its edges differ, so a reversal costs 1.
    """
    e = np.asarray(est) != 0
    t = np.asarray(truth) != 0
    _check_pair(e, t)
    differs = (e != t) | (e.T != t.T)
    return int(np.sum(np.triu(differs, k=1)))


def directed_shd(est: np.ndarray, truth: np.ndarray) -> int:
    """Mismatches over ordered off-diagonal pairs.

    Used for lag blocks, where u at t−k -> v at t and v at t−k -> u at t
    are separate edges, so a "reversed" lagged edge costs 2.
    """
    conf = confusion(est, truth)
    return conf.fp + conf.fn


def _require_both_classes(y: np.ndarray) -> None:
    if y.size == 0 or y.all() or not y.any():
        raise UndefinedMetricError("truth needs at least one positive and one negative pair")


def auroc_pairs(s: np.ndarray, y: np.ndarray) -> float:
    """Mann–Whitney statistic on flat pairs; tied scores share their rank."""
    _require_both_classes(y)
    ranks = pd.Series(s).rank(method="average").to_numpy()
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _sweep(s: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Cumulative (tp, fp) at each distinct score threshold, descending."""
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    tp = np.cumsum(y)
    fp = np.cumsum(~y)
    last = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    return tp[last].astype(np.float64), fp[last].astype(np.float64)


def roc_sweep_pairs(s: np.ndarray, y: np.ndarray) -> float:
    """ROC area by the trapezoid rule over every distinct threshold."""
    _require_both_classes(y)
    tp, fp = _sweep(s, y)
    tpr = np.r_[0.0, tp / y.sum()]
    fpr = np.r_[0.0, fp / (~y).sum()]
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def auprc_pairs(s: np.ndarray, y: np.ndarray) -> float:
    """Precision-recall area by the trapezoid rule, starting at (0, 1)."""
    _require_both_classes(y)
    tp, fp = _sweep(s, y)
    recall = np.r_[0.0, tp / y.sum()]
    precision = np.r_[1.0, tp / (tp + fp)]
    return float(np.sum(np.diff(recall) * (precision[1:] + precision[:-1]) / 2.0))


def auroc(scores: np.ndarray, truth: np.ndarray) -> float:
    return auroc_pairs(*off_diagonal_pairs(scores, truth))


def roc_sweep(scores: np.ndarray, truth: np.ndarray) -> float:
    return roc_sweep_pairs(*off_diagonal_pairs(scores, truth))


def auprc(scores: np.ndarray, truth: np.ndarray) -> float:
    return auprc_pairs(*off_diagonal_pairs(scores, truth))


def _defined(metric, s: np.ndarray, y: np.ndarray) -> Optional[float]:
    try:
        return metric(s, y)
    except UndefinedMetricError:
        return None


def _target(conf: Confusion, distance: int, s: np.ndarray, y: np.ndarray) -> TargetMetrics:
    rec = tpr_f1(conf)
    return TargetMetrics(
        tpr=rec.tpr,
        precision=rec.precision,
        f1=rec.f1,
        shd=distance,
        auroc=_defined(auroc_pairs, s, y),
        auprc=_defined(auprc_pairs, s, y),
        tp=conf.tp,
        fp=conf.fp,
        fn=conf.fn,
        tn=conf.tn,
    )


def evaluate_target(est: np.ndarray, scores: np.ndarray, truth: np.ndarray) -> TargetMetrics:
    """Metrics for one graph; undefined AUCs come back as None."""
    return _target(confusion(est, truth), shd(est, truth), *off_diagonal_pairs(scores, truth))


def evaluate_lagged(
    est: Sequence[np.ndarray],
    scores: Sequence[np.ndarray],
    truth: Sequence[np.ndarray],
) -> Optional[TargetMetrics]:
    """Pool every lag block into one target; None when there are no lags.

    SHD here counts ordered mismatches (see directed_shd).
    """
    if not (len(est) == len(scores) == len(truth)):
        raise DimensionError(
            f"lag block counts differ: {len(est)} estimated, {len(scores)} scored, {len(truth)} true"
        )
    if not truth:
        return None
    conf = Confusion(0, 0, 0, 0)
    distance = 0
    flat_s, flat_y = [], []
    for e, sc, t in zip(est, scores, truth):
        conf = conf + confusion(e, t)
        distance += directed_shd(e, t)
        s, y = off_diagonal_pairs(sc, t)
        flat_s.append(s)
        flat_y.append(y)
    return _target(conf, distance, np.concatenate(flat_s), np.concatenate(flat_y))


def evaluate_graphs(
    w_binary: np.ndarray,
    w_scores: np.ndarray,
    w_true: np.ndarray,
    a_binary: Sequence[np.ndarray] = (),
    a_scores: Sequence[np.ndarray] = (),
    a_true: Sequence[np.ndarray] = (),
) -> GraphMetrics:
    """Instantaneous and pooled-lagged metrics for one fit."""
    return GraphMetrics(
        instantaneous=evaluate_target(w_binary, w_scores, w_true),
        lagged=evaluate_lagged(list(a_binary), list(a_scores), list(a_true)),
    )
