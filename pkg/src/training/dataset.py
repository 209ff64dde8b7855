"""Aligned (X_t, Y) sample rows built from one or more series."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionError, InputError


def make_samples(series: Sequence[np.ndarray], lag: int) -> Tuple[np.ndarray, np.ndarray]:
    """Stack X rows and lagged Y = [X_{t−1} | ... | X_{t−lag}] rows.

    Rows never mix series: each series contributes T_s − lag rows.

    Raises:
        InputError: If a series has lag rows or fewer
        DimensionError: If the series disagree on the variable count
    """
    if lag < 0:
        raise InputError(f"lag must be nonnegative, got {lag}")
    if not series:
        raise InputError("no series given")

    d = np.asarray(series[0]).shape[1]
    xs, ys = [], []
    for index, s in enumerate(series):
        s = np.asarray(s, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != d:
            raise DimensionError(f"series {index} has shape {s.shape}, expected T x {d}")
        length = s.shape[0]
        if length <= lag:
            raise InputError(f"series {index} has {length} rows; needs more than lag={lag}")
        xs.append(s[lag:])
        ys.append(np.hstack([s[lag - j:length - j] for j in range(1, lag + 1)])
                  if lag else np.zeros((length, 0)))
    return np.vstack(xs), np.vstack(ys)


@dataclass
class TimeSeriesDataset:
    """Pooled sample rows with the series they came from."""
    x: np.ndarray
    y: np.ndarray
    lag: int
    names: List[str] = field(default_factory=list)
    n_series: int = 1
    mean: Optional[np.ndarray] = None

    @classmethod
    def from_series(
        cls,
        series: Sequence[np.ndarray],
        lag: int,
        names: Optional[List[str]] = None,
        center: bool = True,
    ) -> "TimeSeriesDataset":
        """Build samples, column-centring over all series first."""
        series = [np.asarray(s, dtype=np.float64) for s in series]
        mean = None
        if center and series:
            mean = np.vstack(series).mean(axis=0)
            series = [s - mean for s in series]
        x, y = make_samples(series, lag)
        d = x.shape[1]
        return cls(
            x=x,
            y=y,
            lag=lag,
            names=list(names) if names else [f"x{i}" for i in range(d)],
            n_series=len(series),
            mean=mean,
        )

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]
