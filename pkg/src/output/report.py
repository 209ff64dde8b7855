"""Versioned run reports (report.json)."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from src import __version__
from src.errors import InputError
from src.evaluation.metrics import GraphMetrics
from src.model.objective import LossValue
from src.output.io import read_json, write_json

SCHEMA_VERSION = 2
REPORT_NAME = "report.json"
TIMING_NAME = "timing.json"


@dataclass
class LossTrace:
    epochs_run: int
    first: Optional[LossValue]
    last: Optional[LossValue]
    best: Optional[LossValue]
    aborted: bool = False
    abort_reason: Optional[str] = None

    @classmethod
    def from_history(
        cls,
        history: List[LossValue],
        epochs_run: int,
        aborted: bool = False,
        abort_reason: Optional[str] = None,
    ) -> "LossTrace":
        return cls(
            epochs_run=epochs_run,
            first=history[0] if history else None,
            last=history[-1] if history else None,
            best=min(history, key=lambda v: v.total) if history else None,
            aborted=aborted,
            abort_reason=abort_reason,
        )

    def to_dict(self) -> Dict[str, Any]:
        def dump(value: Optional[LossValue]):
            return value.to_dict() if value is not None else None

        return {
            "epochs_run": self.epochs_run,
            "first": dump(self.first),
            "last": dump(self.last),
            "best": dump(self.best),
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LossTrace":
        def load(value):
            return LossValue.from_dict(value) if value is not None else None

        return cls(
            epochs_run=int(data["epochs_run"]),
            first=load(data.get("first")),
            last=load(data.get("last")),
            best=load(data.get("best")),
            aborted=bool(data.get("aborted", False)),
            abort_reason=data.get("abort_reason"),
        )


@dataclass
class RunReport:
    """Everything one command run produced, minus the matrices.

    report.json is a pure function of inputs and seeds; the wall time goes
    to the timing.json sidecar next to it.
    """
    command: str
    seed: Optional[int] = None
    config: Dict[str, Any] = field(default_factory=dict)
    metrics: Optional[Dict[str, Any]] = None
    loss_trace: Optional[LossTrace] = None
    wall_time_seconds: float = 0.0
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def set_metrics(self, metrics: GraphMetrics) -> None:
        self.metrics = metrics.to_dict()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "metrics": self.metrics,
            "loss_trace": self.loss_trace.to_dict() if self.loss_trace is not None else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], wall_time_seconds: float = 0.0) -> "RunReport":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise InputError(f"unsupported report schema version {version!r}")
        trace = data.get("loss_trace")
        return cls(
            command=data["command"],
            seed=data.get("seed"),
            config=data.get("config") or {},
            metrics=data.get("metrics"),
            loss_trace=LossTrace.from_dict(trace) if trace is not None else None,
            wall_time_seconds=wall_time_seconds,
            tool_version=data.get("tool_version", __version__),
            schema_version=version,
        )

    def save(self, directory: Path) -> Path:
        path = Path(directory) / REPORT_NAME
        write_json(self.to_dict(), path)
        write_json({"command": self.command, "wall_time_seconds": self.wall_time_seconds},
                   Path(directory) / TIMING_NAME)
        return path

    @classmethod
    def load(cls, directory: Path) -> "RunReport":
        timing = Path(directory) / TIMING_NAME
        wall_time = float(read_json(timing).get("wall_time_seconds", 0.0)) if timing.exists() else 0.0
        return cls.from_dict(read_json(Path(directory) / REPORT_NAME), wall_time)
