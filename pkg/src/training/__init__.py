"""Sample alignment, optimizer and training loop."""

from src.training.adam import AdamState, adam_step
from src.training.dataset import TimeSeriesDataset, make_samples
from src.training.trainer import FitResult, TrainConfig, fit, threshold_graph

__all__ = [
    "AdamState",
    "FitResult",
    "TimeSeriesDataset",
    "TrainConfig",
    "adam_step",
    "fit",
    "make_samples",
    "threshold_graph",
]
