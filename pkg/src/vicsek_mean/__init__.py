"""Seed-reproducible simulation and Monte-Carlo analysis of the bounded-box Vicsek model."""

from .model import SimParams, WorldState, MetricsRecord, step
from .noise import NoiseKind, RngStream, sample_noise

__all__ = ["SimParams", "WorldState", "MetricsRecord", "step", "NoiseKind", "RngStream", "sample_noise"]
