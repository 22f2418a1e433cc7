"""Deterministic noise schedules that steer the flock into a small ball.

Each schedule assigns every agent a noise value of magnitude
``(alpha + delta) / 2`` (a fixed point inside the admissible band
``(alpha, delta)``) with a sign chosen from the current state:

* ``angle_control_series``: push the low headings of a component up and the
  high ones down, which contracts the heading spread;
* ``boundary_control_series``: split a component lying on the walls by its
  anticlockwise position along the perimeter;
* ``two_group_control_series``: steer two tight groups towards their common
  mean heading.

``merge_controller`` picks a schedule per component from the world state
alone, so controller runs are reproducible without any random draws.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .model import (
    SimParams,
    WorldState,
    _components_from_neighbors,
    component_diameter,
    d_x_metric,
    neighbor_lists,
)

__all__ = [
    "Phase",
    "ControllerPhase",
    "control_magnitude",
    "perimeter_coordinate",
    "angle_control_series",
    "boundary_control_series",
    "two_group_control_series",
    "merge_controller",
]


class Phase(str, Enum):
    ANGLE_CONTRACT = "AngleContract"
    BOUNDARY_ALIGN = "BoundaryAlign"
    TWO_GROUP_MERGE = "TwoGroupMerge"
    IDLE = "Idle"


@dataclass(frozen=True)
class ControllerPhase:
    """Phase reported by the controller for one step.

    ``component_phases`` lists, per connected component (ordered by smallest
    member), the schedule that was applied to it.
    """

    phase: Phase
    alpha: float
    component_phases: tuple[Phase, ...] = ()

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")


def _check_band(alpha: float, delta: float) -> None:
    if not 0 < alpha < delta:
        raise ValueError(f"control schedules need 0 < alpha < delta (got alpha={alpha}, delta={delta})")


def control_magnitude(alpha: float, delta: float) -> float:
    return 0.5 * (alpha + delta)


def angle_control_series(world: WorldState, component: Sequence[int], alpha: float, delta: float) -> np.ndarray:
    """Noise for ``component`` (in the given order): ``+m`` below the heading midpoint, ``-m`` otherwise."""
    _check_band(alpha, delta)
    idx = np.asarray(component, dtype=int)
    if idx.size == 0:
        raise ValueError("component must be non-empty")
    th = world.theta[idx]
    mid = 0.5 * (th.min() + th.max())
    m = control_magnitude(alpha, delta)
    return np.where(th < mid, m, -m)


def _on_boundary(p, B: float) -> bool:
    return p[0] == 0.0 or p[0] == B or p[1] == 0.0 or p[1] == B


def perimeter_coordinate(p, B: float) -> float:
    """Arc length along the boundary, anticlockwise from the corner ``(0, 0)``.

    Sides are visited bottom, right, top, left; a corner belongs to the first
    side that reaches it.
    """
    x, y = float(p[0]), float(p[1])
    if y == 0.0:
        return x
    if x == B:
        return B + y
    if y == B:
        return 2 * B + (B - x)
    if x == 0.0:
        return 3 * B + (B - y)
    raise ValueError(f"point {p!r} is not on the boundary of [0, {B}]^2")


def boundary_control_series(
    world: WorldState, component: Sequence[int], alpha: float, delta: float, B: float
) -> np.ndarray:
    """Noise for ``component`` (in the given order) split by perimeter rank.

    Agents are ranked ``1..w`` anticlockwise from ``(0, 0)`` (ties by index);
    rank ``< w/2`` gets ``+m``, the rest ``-m``.
    """
    _check_band(alpha, delta)
    idx = [int(i) for i in component]
    if not idx:
        raise ValueError("component must be non-empty")
    for i in idx:
        if not _on_boundary(world.x[i], B):
            raise ValueError(f"agent {i} at {tuple(world.x[i])} is strictly inside the domain")
    s = [perimeter_coordinate(world.x[i], B) for i in idx]
    order = sorted(range(len(idx)), key=lambda k: (s[k], idx[k]))
    w = len(idx)
    m = control_magnitude(alpha, delta)
    out = np.empty(w)
    for rank0, k in enumerate(order):
        out[k] = m if rank0 + 1 < w / 2 else -m
    return out


def two_group_control_series(
    world: WorldState, groups: Sequence[Sequence[int]], alpha: float, delta: float
) -> tuple[np.ndarray, np.ndarray]:
    """Noise for two disjoint groups, split at the midpoint of the group-mean headings."""
    _check_band(alpha, delta)
    if len(groups) != 2:
        raise ValueError("exactly two groups are required")
    g1 = np.asarray(groups[0], dtype=int)
    g2 = np.asarray(groups[1], dtype=int)
    if g1.size == 0 or g2.size == 0:
        raise ValueError("groups must be non-empty")
    if set(g1.tolist()) & set(g2.tolist()):
        raise ValueError("groups overlap")
    mid = 0.5 * (world.theta[g1].mean() + world.theta[g2].mean())
    m = control_magnitude(alpha, delta)
    return np.where(world.theta[g1] < mid, m, -m), np.where(world.theta[g2] < mid, m, -m)


def _closest_pair(world: WorldState, comps: list[tuple[int, ...]]) -> tuple[int, int]:
    centroids = np.array([world.x[list(c)].mean(axis=0) for c in comps])
    best, pair = np.inf, (0, 1)
    for a in range(len(comps)):
        for b in range(a + 1, len(comps)):
            d = float(np.hypot(*(centroids[a] - centroids[b])))
            if d < best:
                best, pair = d, (a, b)
    return pair


def merge_controller(
    world: WorldState,
    params: SimParams,
    alpha: float | None = None,
    epsilon: float | None = None,
) -> tuple[np.ndarray, ControllerPhase]:
    """One step of the staged merging controller.

    * ``Idle`` (zero noise) once the whole flock has diameter ``< epsilon``.
    * ``TwoGroupMerge`` when there are at least two components and every one
      of them has diameter ``< epsilon``: the two components with the closest
      centroids get the two-group schedule, the others the angle schedule.
    * Otherwise per component: ``BoundaryAlign`` when its heading spread is
      at most ``2 delta`` and all its members are on the walls,
      ``AngleContract`` else. The reported phase is ``AngleContract`` if any
      component is still contracting.

    ``alpha`` defaults to ``delta / 2`` and ``epsilon`` to ``r / 3``.
    """
    delta = params.delta
    alpha = 0.5 * delta if alpha is None else alpha
    epsilon = params.r / 3.0 if epsilon is None else epsilon
    _check_band(alpha, delta)
    n = world.n

    if d_x_metric(world) < epsilon:
        return np.zeros(n), ControllerPhase(Phase.IDLE, alpha)

    comps = _components_from_neighbors(neighbor_lists(world, params.r))
    xi = np.zeros(n)
    phases: list[Phase] = []

    tight = all(component_diameter(world, c) < epsilon for c in comps)
    if len(comps) >= 2 and tight:
        a, b = _closest_pair(world, comps)
        for k, c in enumerate(comps):
            if k in (a, b):
                phases.append(Phase.TWO_GROUP_MERGE)
            else:
                xi[list(c)] = angle_control_series(world, c, alpha, delta)
                phases.append(Phase.ANGLE_CONTRACT)
        xa, xb = two_group_control_series(world, (comps[a], comps[b]), alpha, delta)
        xi[list(comps[a])] = xa
        xi[list(comps[b])] = xb
        return xi, ControllerPhase(Phase.TWO_GROUP_MERGE, alpha, tuple(phases))

    for c in comps:
        th = world.theta[list(c)]
        settled = th.max() - th.min() <= 2 * delta
        if settled and all(_on_boundary(world.x[i], params.B) for i in c):
            xi[list(c)] = boundary_control_series(world, c, alpha, delta, params.B)
            phases.append(Phase.BOUNDARY_ALIGN)
        else:
            xi[list(c)] = angle_control_series(world, c, alpha, delta)
            phases.append(Phase.ANGLE_CONTRACT)
    phase = Phase.ANGLE_CONTRACT if Phase.ANGLE_CONTRACT in phases else Phase.BOUNDARY_ALIGN
    return xi, ControllerPhase(phase, alpha, tuple(phases))
