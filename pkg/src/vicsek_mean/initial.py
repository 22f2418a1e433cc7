"""Initial-condition generators.

Every initializer draws from the run's ``RngStream`` in a fixed order
(headings first, then positions, agent by agent), so a run's starting state
depends only on ``(seed, run_index)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SimParams, WorldState
from .noise import RngStream

__all__ = ["UniformInit", "ExplicitInit", "TwoClustersInit", "ClusterInit", "Initializer", "DEFAULT_ANGLE"]

DEFAULT_ANGLE = math.pi / 40


def _check_range(lo: float, hi: float) -> None:
    if not lo < hi:
        raise ValueError(f"angle range needs lo < hi (got lo={lo}, hi={hi})")


@dataclass(frozen=True)
class UniformInit:
    """Headings uniform on ``[lo, hi]``, positions uniform on ``[0, B]^2``."""

    lo: float = -DEFAULT_ANGLE
    hi: float = DEFAULT_ANGLE

    def __post_init__(self):
        _check_range(self.lo, self.hi)

    def generate(self, params: SimParams, rng: RngStream) -> WorldState:
        theta = rng.uniform(self.lo, self.hi, params.n)
        x = rng.uniform(0.0, params.B, (params.n, 2))
        return WorldState(theta, x, 0)


@dataclass(frozen=True)
class ExplicitInit:
    theta: tuple[float, ...]
    x: tuple[tuple[float, float], ...]

    def generate(self, params: SimParams, rng: RngStream | None = None) -> WorldState:
        if len(self.theta) != params.n or len(self.x) != params.n:
            raise ValueError(
                f"explicit initial state has {len(self.theta)} headings and {len(self.x)} positions, n={params.n}"
            )
        x = np.asarray(self.x, dtype=float)
        if np.any(x < 0) or np.any(x > params.B):
            raise ValueError(f"explicit positions must lie in [0, {params.B}]^2")
        return WorldState(np.asarray(self.theta, dtype=float), x, 0)


@dataclass(frozen=True)
class TwoClustersInit:
    """Two groups of coincident agents ``gap`` apart, centred in the box.

    The first ``ceil(n/2)`` agents sit at ``(B/2 - gap/2, B/2)``, the rest at
    ``(B/2 + gap/2, B/2)``. Headings are uniform on ``[lo, hi]``.
    """

    gap: float
    lo: float = -DEFAULT_ANGLE
    hi: float = DEFAULT_ANGLE

    def __post_init__(self):
        _check_range(self.lo, self.hi)
        if self.gap < 0:
            raise ValueError("gap must be >= 0")

    def generate(self, params: SimParams, rng: RngStream) -> WorldState:
        if self.gap > params.B:
            raise ValueError(f"gap {self.gap} does not fit in a box of side {params.B}")
        theta = rng.uniform(self.lo, self.hi, params.n)
        k = math.ceil(params.n / 2)
        x = np.empty((params.n, 2))
        x[:k] = (params.B / 2 - self.gap / 2, params.B / 2)
        x[k:] = (params.B / 2 + self.gap / 2, params.B / 2)
        return WorldState(theta, x, 0)


@dataclass(frozen=True)
class ClusterInit:
    """All agents within a disc of the given ``diameter`` around a uniform random centre.

    Clamping into the box cannot increase pairwise distances, so the initial
    flock diameter is at most ``diameter``.
    """

    diameter: float
    lo: float = -math.pi
    hi: float = math.pi

    def __post_init__(self):
        _check_range(self.lo, self.hi)
        if self.diameter < 0:
            raise ValueError("diameter must be >= 0")

    def generate(self, params: SimParams, rng: RngStream) -> WorldState:
        theta = rng.uniform(self.lo, self.hi, params.n)
        centre = rng.uniform(0.0, params.B, 2)
        u = rng.uniform(0.0, 1.0, (params.n, 2))
        rad = 0.5 * self.diameter * np.sqrt(u[:, 0])
        ang = 2 * np.pi * u[:, 1]
        x = centre + np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))
        return WorldState(theta, np.clip(x, 0.0, params.B) + 0.0, 0)


Initializer = UniformInit | ExplicitInit | TwoClustersInit | ClusterInit
