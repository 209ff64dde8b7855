"""Matrix, series and graph-directory files.

Matrices are dense headerless CSV, written with 17 significant digits so
a write-then-read round trip is exact. Series files carry a header of
variable names and may start with a ``series_id`` column.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionError, InputError, MalformedCSVError
from src.model.objective import LossValue

logger = logging.getLogger(__name__)

SERIES_ID_COLUMN = "series_id"
LOSS_COLUMNS = ["epoch", "total", "data_term", "logdet_term", "sparsity_term", "acyclicity_term"]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _parse(path: Path, line: int, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise MalformedCSVError(path, line, f"not a number: {raw!r}") from None
    if not np.isfinite(value):
        raise MalformedCSVError(path, line, f"non-finite value: {raw!r}")
    return value


def write_matrix(matrix: np.ndarray, path: Path) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        for row in matrix:
            writer.writerow([_fmt(v) for v in row])


def read_matrix(path: Path) -> np.ndarray:
    """Read a headerless numeric CSV; every row must have the same arity."""
    path = Path(path)
    rows: List[List[float]] = []
    width = None
    with open(path, newline="", encoding="utf-8") as f:
        for line, record in enumerate(csv.reader(f), start=1):
            if not record:
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise MalformedCSVError(path, line, f"expected {width} fields, found {len(record)}")
            rows.append([_parse(path, line, raw) for raw in record])
    if not rows:
        raise MalformedCSVError(path, 1, "file is empty")
    return np.array(rows, dtype=np.float64)


def write_series(
    series: Sequence[np.ndarray],
    path: Path,
    names: Optional[Sequence[str]] = None,
) -> None:
    """Write one or more series; several series get a leading series_id column."""
    d = np.asarray(series[0]).shape[1]
    names = list(names) if names else [f"x{i}" for i in range(d)]
    multi = len(series) > 1
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(([SERIES_ID_COLUMN] if multi else []) + names)
        for sid, s in enumerate(series):
            for row in np.asarray(s, dtype=np.float64):
                writer.writerow(([sid] if multi else []) + [_fmt(v) for v in row])


def read_series(path: Path) -> Tuple[List[np.ndarray], List[str]]:
    """Read a series file into per-series arrays (in order of first appearance)."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header:
            raise MalformedCSVError(path, 1, "missing header")
        has_id = header[0].strip() == SERIES_ID_COLUMN
        names = [h.strip() for h in (header[1:] if has_id else header)]
        if not names:
            raise MalformedCSVError(path, 1, "header names no variables")

        groups: Dict[str, List[List[float]]] = {}
        for line, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise MalformedCSVError(path, line, f"expected {len(header)} fields, found {len(record)}")
            key = record[0].strip() if has_id else ""
            values = record[1:] if has_id else record
            groups.setdefault(key, []).append([_parse(path, line, raw) for raw in values])

    if not groups:
        raise MalformedCSVError(path, 2, "no data rows")
    logger.debug("Read %d series with %d variables from %s", len(groups), len(names), path)
    return [np.array(rows, dtype=np.float64) for rows in groups.values()], names


def write_json(data: Dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def read_json(path: Path) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def write_loss_history(history: Iterable[LossValue], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=LOSS_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for epoch, value in enumerate(history):
            writer.writerow({"epoch": epoch, **{k: _fmt(v) for k, v in value.to_dict().items()}})


def truth_paths(directory: Path, p: int) -> Dict[str, Path]:
    paths = {"W": directory / "W_true.csv"}
    paths.update({f"A{k}": directory / f"A{k}_true.csv" for k in range(1, p + 1)})
    return paths


@dataclass
class GraphSet:
    """Weighted and binary graphs loaded from a directory, with their sources."""
    w_weighted: np.ndarray
    w_binary: np.ndarray
    a_weighted: List[np.ndarray] = field(default_factory=list)
    a_binary: List[np.ndarray] = field(default_factory=list)
    sources: Dict[str, Path] = field(default_factory=dict)

    @property
    def w_scores(self) -> np.ndarray:
        return np.abs(self.w_weighted)

    @property
    def a_scores(self) -> List[np.ndarray]:
        return [np.abs(block) for block in self.a_weighted]


def _support(matrix: np.ndarray) -> np.ndarray:
    binary = (matrix != 0).astype(np.float64)
    np.fill_diagonal(binary, 0.0)
    return binary


def _load_one(directory: Path, stem: str, suffix: str, sources: Dict[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    weighted_path = directory / f"{stem}_{suffix}.csv"
    weighted = read_matrix(weighted_path)
    sources[stem] = weighted_path
    binary_path = directory / f"{stem}_{suffix}_binary.csv"
    if binary_path.exists():
        binary = read_matrix(binary_path)
        if binary.shape != weighted.shape:
            raise DimensionError(
                f"{binary_path.name} has shape {binary.shape} but {weighted_path.name} has {weighted.shape}"
            )
        sources[f"{stem}_binary"] = binary_path
        return weighted, binary
    return weighted, _support(weighted)


def load_graphs(directory: Path) -> GraphSet:
    """Load W/A graphs from estimate files (``*_est``) or truth files (``*_true``)."""
    directory = Path(directory)
    if (directory / "W_est.csv").exists():
        suffix = "est"
    elif (directory / "W_true.csv").exists():
        suffix = "true"
    else:
        raise InputError(f"{directory} holds neither W_est.csv nor W_true.csv")

    sources: Dict[str, Path] = {}
    w_weighted, w_binary = _load_one(directory, "W", suffix, sources)
    a_weighted, a_binary = [], []
    k = 1
    while (directory / f"A{k}_{suffix}.csv").exists():
        weighted, binary = _load_one(directory, f"A{k}", suffix, sources)
        a_weighted.append(weighted)
        a_binary.append(binary)
        k += 1
    return GraphSet(w_weighted, w_binary, a_weighted, a_binary, sources)


def check_compatible(est: GraphSet, truth: GraphSet) -> None:
    """Shape agreement between an estimate and a truth, naming the files."""
    if est.w_weighted.shape != truth.w_weighted.shape:
        raise DimensionError(
            f"{est.sources['W']} has shape {est.w_weighted.shape} "
            f"but {truth.sources['W']} has {truth.w_weighted.shape}"
        )
    if len(est.a_weighted) != len(truth.a_weighted):
        raise DimensionError(
            f"estimate has {len(est.a_weighted)} lag files, truth has {len(truth.a_weighted)}"
        )
    for k, (e, t) in enumerate(zip(est.a_weighted, truth.a_weighted), start=1):
        if e.shape != t.shape:
            raise DimensionError(
                f"{est.sources[f'A{k}']} has shape {e.shape} but {truth.sources[f'A{k}']} has {t.shape}"
            )
