"""File formats, run reports, result tables and figures."""

from src.output.io import (
    GraphSet,
    check_compatible,
    load_graphs,
    read_matrix,
    read_series,
    write_json,
    write_loss_history,
    write_matrix,
    write_series,
)
from src.output.report import SCHEMA_VERSION, TIMING_NAME, LossTrace, RunReport

__all__ = [
    "GraphSet",
    "LossTrace",
    "RunReport",
    "SCHEMA_VERSION",
    "TIMING_NAME",
    "check_compatible",
    "load_graphs",
    "read_matrix",
    "read_series",
    "write_json",
    "write_loss_history",
    "write_matrix",
    "write_series",
]
