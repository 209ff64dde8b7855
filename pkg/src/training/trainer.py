"""Mini-batch Adam training of the masked low-rank structural VAR score."""

import logging
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt
from tqdm import trange

from src.autodiff.tape import Tape, backward
from src.config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_LR,
    DEFAULT_SEED,
    DEFAULT_TAU_FINAL,
    DEFAULT_THRESHOLD,
    LAMBDA1_EVERY,
    LAMBDA1_GROWTH,
    LAMBDA1_MAX,
)
from src.errors import InputError, NumericalError, SingularMatrixError
from src.evaluation.dag import break_cycles
from src.model.acml import MaskConfig, PriorityVector, temperature
from src.model.dgpl import default_embed_dim, record_masked
from src.model.local import LocalModel
from src.model.objective import LossConfig, LossKind, LossValue, record_loss
from src.training.adam import AdamState, adam_step
from src.training.dataset import TimeSeriesDataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one fit."""
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    lr: float = DEFAULT_LR
    seed: int = DEFAULT_SEED
    threshold: float = DEFAULT_THRESHOLD
    loss: LossConfig = field(default_factory=LossConfig)
    mask: MaskConfig = field(default_factory=MaskConfig)
    embed_dim: Optional[int] = None
    use_dgpl: bool = True
    tau_final: float = DEFAULT_TAU_FINAL
    escalate_lambda1: bool = True
    center: bool = True
    progress: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise InputError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise InputError(f"batch size must be >= 1, got {self.batch_size}")
        if self.threshold < 0:
            raise InputError(f"threshold must be >= 0, got {self.threshold}")
        if not self.lr > 0:
            raise InputError(f"learning rate must be positive, got {self.lr}")
        if not self.tau_final > 0:
            raise InputError(f"final temperature must be positive, got {self.tau_final}")
        if self.embed_dim is not None and self.embed_dim < 1:
            raise InputError(f"embedding dimension must be >= 1, got {self.embed_dim}")

    @property
    def use_mask(self) -> bool:
        return self.loss.use_mask

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["loss"]["kind"] = self.loss.kind.value
        data["mask"]["mode"] = self.mask.mode.value
        data.pop("progress")
        return data


@dataclass
class FitResult:
    """Weighted and binarised graphs plus the training trace."""
    w_weighted: np.ndarray
    w_binary: np.ndarray
    a_weighted: List[np.ndarray]
    a_binary: List[np.ndarray]
    p_final: Optional[PriorityVector]
    loss_history: List[LossValue]
    wall_time_seconds: float
    embed_dim: Optional[int] = None
    epochs_run: int = 0
    aborted: bool = False
    abort_reason: Optional[str] = None

    @property
    def lag_order(self) -> int:
        return len(self.a_weighted)

    @property
    def w_scores(self) -> np.ndarray:
        return np.abs(self.w_weighted)

    @property
    def a_scores(self) -> List[np.ndarray]:
        return [np.abs(block) for block in self.a_weighted]


def threshold_graph(w: np.ndarray, thr: float) -> np.ndarray:
    """1 where |w| > thr, zero diagonal."""
    if thr < 0:
        raise InputError(f"threshold must be >= 0, got {thr}")
    binary = (np.abs(np.asarray(w, dtype=np.float64)) > thr).astype(np.float64)
    np.fill_diagonal(binary, 0.0)
    return binary


def lambda1_at(cfg: TrainConfig, epoch: int) -> float:
    """Acyclicity weight for an epoch: ×10 every 500 epochs, capped."""
    if cfg.use_mask:
        return 0.0
    base = cfg.loss.lambda1
    if not cfg.escalate_lambda1 or base == 0:
        return base
    return min(base * LAMBDA1_GROWTH ** (epoch // LAMBDA1_EVERY), max(base, LAMBDA1_MAX))


def _batch_step(
    model: LocalModel,
    xb: np.ndarray,
    yb: np.ndarray,
    mask_cfg: MaskConfig,
    loss_cfg: LossConfig,
    lambda1: float,
    rng: np.random.Generator,
) -> Tuple[LossValue, Dict[str, np.ndarray]]:
    tape = Tape()
    forward = model.record(tape, mask_cfg, rng)
    w_dag = None
    if model.use_mask and loss_cfg.kind is LossKind.QMLE:
        # the hard mask is a strict order, so det(I − W∘H) = 1
        w_dag = record_masked(tape, forward.w, tape.constant(model.evaluation_mask(mask_cfg.omega)))
    terms = record_loss(
        tape, tape.constant(xb), tape.constant(yb), forward.w_eff, forward.a, loss_cfg, lambda1, w_dag
    )
    grads = backward(tape, terms.total)
    return terms.value(), model.gradients(grads, forward)


def _batch_step_with_retry(*args) -> Tuple[LossValue, Dict[str, np.ndarray]]:
    """Redraw the mask noise once if S comes out singular."""
    for attempt in Retrying(
        stop=stop_after_attempt(2),
        retry=retry_if_exception_type(SingularMatrixError),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    ):
        with attempt:
            outcome = _batch_step(*args)
    return outcome


def finalize(model: LocalModel, cfg: TrainConfig) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """Hard-mask, then threshold W and every lag block."""
    w_weighted = model.instantaneous() * model.evaluation_mask(cfg.mask.omega)
    w_binary = threshold_graph(w_weighted, cfg.threshold)
    if not cfg.use_mask:
        w_binary = break_cycles(w_binary, w_weighted)
    a_weighted = model.lag_blocks()
    a_binary = [threshold_graph(block, cfg.threshold) for block in a_weighted]
    return w_weighted, w_binary, a_weighted, a_binary


def fit(dataset: TimeSeriesDataset, cfg: TrainConfig) -> FitResult:
    """Train on the dataset and binarise the learned graphs.

    Every random draw (initialisation, shuffling, Gumbel noise) comes from
    one generator seeded with cfg.seed, so a fit is reproducible.
    """
    if dataset.n < cfg.batch_size:
        raise InputError(f"dataset has {dataset.n} samples, fewer than batch size {cfg.batch_size}")

    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    d, n = dataset.d, dataset.n
    embed_dim = None
    if cfg.use_dgpl:
        embed_dim = cfg.embed_dim if cfg.embed_dim is not None else default_embed_dim(d)
    model = LocalModel.initialize(d, dataset.lag, embed_dim or d, rng, cfg.use_dgpl, cfg.use_mask)
    state = AdamState(lr=cfg.lr)

    history: List[LossValue] = []
    aborted, reason = False, None
    epochs_run = 0
    for epoch in trange(cfg.epochs, desc="fit", disable=not cfg.progress):
        mask_cfg = replace(cfg.mask, tau=temperature(epoch, cfg.epochs, cfg.mask.tau, cfg.tau_final))
        lambda1 = lambda1_at(cfg, epoch)
        order = rng.permutation(n)
        batch_losses: List[LossValue] = []

        for offset in range(0, n, cfg.batch_size):
            idx = order[offset:offset + cfg.batch_size]
            try:
                loss, grads = _batch_step_with_retry(
                    model, dataset.x[idx], dataset.y[idx], mask_cfg, cfg.loss, lambda1, rng
                )
            except SingularMatrixError as exc:
                logger.warning("Epoch %d aborted after %d batches: %s", epoch, len(batch_losses), exc)
                break
            except NumericalError as exc:
                aborted, reason = True, f"epoch {epoch}: {exc}"
                break
            try:
                model.params = adam_step(state, model.params, grads)
            except NumericalError as exc:
                aborted, reason = True, f"epoch {epoch}: {exc}"
                break
            batch_losses.append(loss)

        if batch_losses:
            history.append(LossValue.mean(batch_losses))
        epochs_run = epoch + 1
        if aborted:
            logger.error("Training stopped, keeping last good parameters (%s)", reason)
            break

    w_weighted, w_binary, a_weighted, a_binary = finalize(model, cfg)
    return FitResult(
        w_weighted=w_weighted,
        w_binary=w_binary,
        a_weighted=a_weighted,
        a_binary=a_binary,
        p_final=model.priority,
        loss_history=history,
        wall_time_seconds=time.perf_counter() - started,
        embed_dim=embed_dim,
        epochs_run=epochs_run,
        aborted=aborted,
        abort_reason=reason,
    )
