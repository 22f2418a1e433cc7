"""Bounded-box Vicsek dynamics with arithmetic heading averaging.

Agents live in the closed square ``[0, B]^2``. At every step each agent
replaces its heading by the arithmetic mean of the headings of all agents
within distance ``r`` (itself included), adds a bounded noise term, and then
moves a distance ``v`` along the new heading. Positions that leave the box are
projected back onto it coordinate-wise.

Headings are never wrapped: they are plain reals, and only ``cos``/``sin``
consume them. Agent indices are 0-based throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .noise import NoiseKind

__all__ = [
    "SimParams",
    "AgentState",
    "WorldState",
    "MetricsRecord",
    "clamp_coord",
    "clamp_point",
    "neighbor_set",
    "neighbor_lists",
    "aligned_headings",
    "step",
    "d_theta_metric",
    "d_x_metric",
    "wrapped_d_theta_metric",
    "connected_components",
    "component_diameter",
    "mean_heading",
    "metrics",
]

U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SimParams:
    """Model configuration: geometry, noise, horizon and master seed."""

    n: int
    B: float
    r: float
    v: float
    delta: float
    seed: int
    noise_kind: NoiseKind = NoiseKind.UNIFORM
    horizon: int = 500
    # agent count from which neighbour queries go through the cell grid
    grid_threshold: int = 32

    def __post_init__(self):
        object.__setattr__(self, "noise_kind", NoiseKind(self.noise_kind))
        problems = []
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            problems.append(f"n must be an integer >= 1 (got {self.n!r})")
        if not (math.isfinite(self.B) and self.B > 0):
            problems.append(f"B must satisfy B > 0 (got {self.B!r})")
        if not (math.isfinite(self.r) and 0 < self.r < self.B):
            problems.append(f"r must satisfy 0 < r < B (got r={self.r!r}, B={self.B!r})")
        if not (math.isfinite(self.v) and self.v > 0):
            problems.append(f"v must satisfy v > 0 (got {self.v!r})")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            problems.append(f"delta must satisfy delta >= 0 (got {self.delta!r})")
        if isinstance(self.horizon, bool) or not isinstance(self.horizon, (int, np.integer)) or self.horizon < 0:
            problems.append(f"horizon must be an integer >= 0 (got {self.horizon!r})")
        if (
            isinstance(self.seed, bool)
            or not isinstance(self.seed, (int, np.integer))
            or not 0 <= self.seed <= U64_MAX
        ):
            problems.append(f"seed must be an integer in [0, 2**64 - 1] (got {self.seed!r})")
        if problems:
            raise ValueError("; ".join(problems))

    def replace(self, **changes) -> "SimParams":
        return replace(self, **changes)


class AgentState(NamedTuple):
    theta: float
    x: tuple[float, float]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WorldState:
    """Headings ``theta`` (shape ``(n,)``) and positions ``x`` (shape ``(n, 2)``) at step ``t``.

    The arrays are private read-only copies, so a state can be shared freely.
    """

    theta: np.ndarray
    x: np.ndarray
    t: int = 0

    def __post_init__(self):
        theta = _frozen(self.theta)
        x = _frozen(self.x)
        if theta.ndim != 1 or theta.size < 1:
            raise ValueError("theta must be a non-empty 1-D sequence")
        if x.shape != (theta.size, 2):
            raise ValueError(f"x must have shape ({theta.size}, 2), got {x.shape}")
        if not (np.isfinite(theta).all() and np.isfinite(x).all()):
            raise ValueError("world state must be finite")
        if self.t < 0:
            raise ValueError("t must be >= 0")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", int(self.t))

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def agents(self) -> list[AgentState]:
        return [AgentState(float(th), (float(p[0]), float(p[1]))) for th, p in zip(self.theta, self.x)]

    def __eq__(self, other):
        if not isinstance(other, WorldState):
            return NotImplemented
        return (
            self.t == other.t
            and np.array_equal(self.theta, other.theta)
            and np.array_equal(self.x, other.x)
        )

    __hash__ = None


@dataclass(frozen=True)
class MetricsRecord:
    t: int
    d_theta: float
    d_x: float
    components: int
    mean_heading: float


# ---------------------------------------------------------------- clamping


def clamp_coord(y: float, B: float) -> float:
    """Project ``y`` onto ``[0, B]``."""
    if not math.isfinite(y):
        raise ValueError(f"cannot clamp non-finite value {y!r}")
    if B <= 0:
        raise ValueError("B must be > 0")
    if y < 0:
        return 0.0
    if y > B:
        return float(B)
    return float(y)


def clamp_point(p: Sequence[float], B: float) -> tuple[float, float]:
    return clamp_coord(p[0], B), clamp_coord(p[1], B)


def _clamp_points(x: np.ndarray, B: float) -> np.ndarray:
    # np.clip keeps -0.0; normalise so clamped coordinates are exactly 0.0
    out = np.clip(x, 0.0, B)
    out[out == 0.0] = 0.0
    return out


# ---------------------------------------------------------------- neighbours


def pair_distances(x: np.ndarray) -> np.ndarray:
    """All pairwise Euclidean distances, ``(n, n)``.

    Every distance test in the package goes through ``np.hypot`` of the
    coordinate differences so that the naive and grid paths agree bit-for-bit.
    """
    dx = x[:, 0][:, None] - x[:, 0][None, :]
    dy = x[:, 1][:, None] - x[:, 1][None, :]
    return np.hypot(dx, dy)


def _adjacency(x: np.ndarray, r: float) -> np.ndarray:
    return pair_distances(x) <= r


def _check_index(i: int, n: int) -> int:
    if not (0 <= i < n):
        raise IndexError(f"agent index {i} out of range for n={n}")
    return int(i)


def neighbor_set(world: WorldState, i: int, r: float) -> frozenset[int]:
    """Indices ``j`` with ``|x_i - x_j| <= r``; always contains ``i``."""
    i = _check_index(i, world.n)
    d = np.hypot(world.x[:, 0] - world.x[i, 0], world.x[:, 1] - world.x[i, 1])
    return frozenset(int(j) for j in np.flatnonzero(d <= r))


def neighbor_lists(world: WorldState, r: float, B: float | None = None, use_grid: bool = False) -> list[np.ndarray]:
    """Sorted neighbour index arrays for every agent.

    With ``use_grid`` the candidates come from a cell grid of side ``r``;
    the result is identical to the brute-force path.
    """
    if use_grid:
        from .spatial import build_grid, grid_neighbor_lists

        if B is None:
            raise ValueError("B is required for the grid path")
        return grid_neighbor_lists(build_grid(world, r, B), world, r)
    return lists_from_adjacency(_adjacency(world.x, r))


def lists_from_adjacency(adj: np.ndarray) -> list[np.ndarray]:
    rows, cols = np.nonzero(adj)
    return np.split(cols, np.cumsum(np.bincount(rows, minlength=adj.shape[0]))[:-1])


# ---------------------------------------------------------------- update rule


def aligned_headings(theta: np.ndarray, neighbors: Sequence[np.ndarray]) -> np.ndarray:
    """Arithmetic neighbourhood means of ``theta``.

    Sums are taken relative to ``theta[0]`` so that agents sharing a
    neighbourhood get bit-identical means and equal headings average to
    themselves exactly.
    """
    ref = theta[0]
    offsets = theta - ref
    means = np.empty_like(theta)
    for i, nb in enumerate(neighbors):
        means[i] = offsets[nb].sum() / nb.size
    return means + ref


def step(
    world: WorldState,
    params: SimParams,
    noise: Sequence[float],
    neighbors: Sequence[np.ndarray] | None = None,
) -> WorldState:
    """Advance ``world`` by one synchronous update.

    Neighbourhoods are taken from the positions at ``world.t``. ``neighbors``
    may be passed when the caller already computed them for this state.
    """
    xi = np.asarray(noise, dtype=float)
    if xi.shape != (world.n,):
        raise ValueError(f"noise has shape {xi.shape}, expected ({world.n},)")
    if not np.isfinite(xi).all():
        raise ValueError("noise contains non-finite values")
    if neighbors is None:
        neighbors = neighbor_lists(world, params.r, params.B, use_grid=world.n >= params.grid_threshold)
    theta = aligned_headings(world.theta, neighbors) + xi
    heading = np.empty_like(world.x)
    heading[:, 0] = np.cos(theta)
    heading[:, 1] = np.sin(theta)
    x = _clamp_points(world.x + params.v * heading, params.B)
    if not (np.isfinite(theta).all() and np.isfinite(x).all()):
        raise FloatingPointError(f"non-finite state produced at t={world.t + 1}")
    return WorldState(theta, x, world.t + 1)


# ---------------------------------------------------------------- metrics


def d_theta_metric(world: WorldState) -> float:
    """Largest raw heading difference over all pairs."""
    return float(world.theta.max() - world.theta.min())


def wrapped_d_theta_metric(world: WorldState) -> float:
    """Diagnostic variant: pairwise differences reduced into ``[-pi, pi]`` first."""
    diff = world.theta[:, None] - world.theta[None, :]
    wrapped = np.angle(np.exp(1j * diff))
    return float(np.abs(wrapped).max())


def d_x_metric(world: WorldState) -> float:
    """Largest pairwise Euclidean distance."""
    return float(pair_distances(world.x).max())


def component_diameter(world: WorldState, members: Sequence[int]) -> float:
    idx = np.asarray(members, dtype=int)
    return float(pair_distances(world.x[idx]).max())


def _components_from_neighbors(neighbors: Sequence[np.ndarray]) -> list[tuple[int, ...]]:
    n = len(neighbors)
    if all(nb.size == n for nb in neighbors):
        return [tuple(range(n))]
    label = [-1] * n
    comps = []
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = len(comps)
        stack, members = [start], [start]
        while stack:
            i = stack.pop()
            for j in neighbors[i]:
                j = int(j)
                if label[j] < 0:
                    label[j] = label[start]
                    stack.append(j)
                    members.append(j)
        comps.append(tuple(sorted(members)))
    # discovery order is by smallest unlabelled index, i.e. sorted by smallest member
    return comps


def connected_components(world: WorldState, r: float) -> list[tuple[int, ...]]:
    """Partition of agents under the transitive closure of ``|x_i - x_j| <= r``.

    Components are sorted internally and ordered by their smallest member.
    """
    return _components_from_neighbors(neighbor_lists(world, r))


def mean_heading(world: WorldState) -> float:
    return float(np.mean(world.theta))


def metrics(world: WorldState, r: float, neighbors: Sequence[np.ndarray] | None = None) -> MetricsRecord:
    if neighbors is None:
        neighbors = neighbor_lists(world, r)
    return MetricsRecord(
        t=world.t,
        d_theta=d_theta_metric(world),
        d_x=d_x_metric(world),
        components=len(_components_from_neighbors(neighbors)),
        mean_heading=mean_heading(world),
    )
