"""Synthetic structural VAR benchmark generation."""

from src.synthetic.generator import (
    GraphSpec,
    GroundTruth,
    SeriesConfig,
    generate_instance,
    instance_meta,
    sample_er_dag,
    sample_ground_truth,
    sample_hub_dag,
    sample_instantaneous_weights,
    sample_lagged_weights,
    simulate,
    simulate_with_noise,
    stability_estimate,
)

__all__ = [
    "GraphSpec",
    "GroundTruth",
    "SeriesConfig",
    "generate_instance",
    "instance_meta",
    "sample_er_dag",
    "sample_ground_truth",
    "sample_hub_dag",
    "sample_instantaneous_weights",
    "sample_lagged_weights",
    "simulate",
    "simulate_with_noise",
    "stability_estimate",
]
