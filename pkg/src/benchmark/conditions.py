"""Ablation conditions for benchmark sweeps."""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict

from src.config import DEFAULT_LAMBDA1
from src.errors import InputError
from src.model.objective import LossConfig, LossKind
from src.training.trainer import TrainConfig


class Ablation(Enum):
    """The full model and its three single-component ablations."""
    NONE = "none"
    NO_DGPL = "no-dgpl"
    NO_ACML = "no-acml"
    NO_QMLE = "no-qmle"


@dataclass(frozen=True)
class ConditionConfig:
    """Which model components a condition keeps."""
    name: str
    use_dgpl: bool = True
    use_mask: bool = True
    loss_kind: LossKind = LossKind.QMLE

    def apply(self, cfg: TrainConfig, lambda1: float = DEFAULT_LAMBDA1) -> TrainConfig:
        """Return cfg with this condition's components switched on or off."""
        loss = LossConfig(
            lambda1=0.0 if self.use_mask else lambda1,
            lambda2=cfg.loss.lambda2,
            kind=self.loss_kind,
            use_mask=self.use_mask,
            scaled=cfg.loss.scaled,
        )
        return replace(cfg, loss=loss, use_dgpl=self.use_dgpl)


CONDITIONS: Dict[Ablation, ConditionConfig] = {
    Ablation.NONE: ConditionConfig(name="none"),
    Ablation.NO_DGPL: ConditionConfig(name="no-dgpl", use_dgpl=False),
    Ablation.NO_ACML: ConditionConfig(name="no-acml", use_mask=False),
    Ablation.NO_QMLE: ConditionConfig(name="no-qmle", loss_kind=LossKind.LSE),
}


def parse_ablation(name: str) -> Ablation:
    try:
        return Ablation(name)
    except ValueError:
        choices = ", ".join(a.value for a in Ablation)
        raise InputError(f"unknown ablation {name!r}; choose from {choices}") from None


def get_condition_config(ablation: Ablation) -> ConditionConfig:
    return CONDITIONS[ablation]
