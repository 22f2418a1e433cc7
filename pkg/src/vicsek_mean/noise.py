"""Bounded zero-mean heading noise and per-run random streams."""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy import stats

__all__ = ["NoiseKind", "RngStream", "sample_noise", "noise_variance"]

# truncated Gaussian: sigma = delta / TRUNC_SIGMAS, support [-delta, delta]
TRUNC_SIGMAS = 3.0


class NoiseKind(str, Enum):
    UNIFORM = "uniform"
    TWO_POINT = "two_point"
    TRUNCATED_GAUSSIAN = "truncated_gaussian"


class RngStream:
    """Random stream owned by one run.

    The stream is derived from ``(master_seed, run_index)`` through
    ``numpy.random.SeedSequence``, so distinct runs get independent streams and
    the same pair always replays the same draws. ``counter`` counts the
    scalar variates handed out so far.
    """

    def __init__(self, master_seed: int, run_index: int = 0):
        if not 0 <= master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if run_index < 0:
            raise ValueError("run_index must be >= 0")
        self.master_seed = int(master_seed)
        self.run_index = int(run_index)
        self.counter = 0
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.run_index,))
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, run_index={self.run_index}, counter={self.counter})"

    def uniform(self, low: float, high: float, size: int | tuple[int, ...]) -> np.ndarray:
        out = self._gen.uniform(low, high, size)
        self.counter += out.size
        return out

    def signs(self, size: int) -> np.ndarray:
        out = self._gen.integers(0, 2, size) * 2.0 - 1.0
        self.counter += out.size
        return out

    def normal(self, scale: float, size: int) -> np.ndarray:
        out = self._gen.normal(0.0, scale, size)
        self.counter += out.size
        return out


def sample_noise(kind: NoiseKind, delta: float, n: int, rng: RngStream) -> np.ndarray:
    """Draw one noise value per agent, in agent-index order, each in ``[-delta, delta]``."""
    kind = NoiseKind(kind)
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if delta == 0:
        return np.zeros(n)
    if kind is NoiseKind.UNIFORM:
        return rng.uniform(-delta, delta, n)
    if kind is NoiseKind.TWO_POINT:
        return delta * rng.signs(n)
    # rejection: redraw out-of-range entries one at a time, lowest index first
    sigma = delta / TRUNC_SIGMAS
    xi = rng.normal(sigma, n)
    for i in range(n):
        while abs(xi[i]) > delta:
            xi[i] = rng.normal(sigma, 1)[0]
    return xi


def noise_variance(kind: NoiseKind, delta: float) -> float:
    """Closed-form variance of a single noise draw."""
    kind = NoiseKind(kind)
    if kind is NoiseKind.UNIFORM:
        return delta**2 / 3.0
    if kind is NoiseKind.TWO_POINT:
        return float(delta**2)
    if delta == 0:
        return 0.0
    sigma = delta / TRUNC_SIGMAS
    return float(stats.truncnorm(-TRUNC_SIGMAS, TRUNC_SIGMAS, scale=sigma).var())
