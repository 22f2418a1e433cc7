"""Uniform cell grid for fixed-radius neighbour queries.

Cells have side ``r``, so every agent within distance ``r`` of a query point
sits in the 3x3 block of cells around it. Coordinates equal to ``B`` fall
into the last cell of their axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import WorldState, _check_index

__all__ = ["CellGrid", "StaleGridError", "build_grid", "grid_neighbor_set", "grid_neighbor_lists"]


class StaleGridError(ValueError):
    """Query against a grid built for a different step."""


@dataclass(frozen=True)
class CellGrid:
    cell_size: float
    grid_dims: tuple[int, int]
    buckets: dict[tuple[int, int], tuple[int, ...]]
    t: int

    def cell_of(self, p) -> tuple[int, int]:
        cx = min(int(math.floor(p[0] / self.cell_size)), self.grid_dims[0] - 1)
        cy = min(int(math.floor(p[1] / self.cell_size)), self.grid_dims[1] - 1)
        return max(cx, 0), max(cy, 0)


def build_grid(world: WorldState, r: float, B: float) -> CellGrid:
    if not 0 < r < B:
        raise ValueError("grid requires 0 < r < B")
    dim = int(math.ceil(B / r))
    cells = np.floor(world.x / r).astype(np.int64)
    np.clip(cells, 0, dim - 1, out=cells)
    buckets: dict[tuple[int, int], list[int]] = {}
    for i, (cx, cy) in enumerate(cells.tolist()):
        buckets.setdefault((cx, cy), []).append(i)
    return CellGrid(
        cell_size=float(r),
        grid_dims=(dim, dim),
        buckets={k: tuple(v) for k, v in buckets.items()},
        t=world.t,
    )


def _candidates(grid: CellGrid, cx: int, cy: int) -> list[int]:
    out = []
    for ix in range(cx - 1, cx + 2):
        for iy in range(cy - 1, cy + 2):
            out.extend(grid.buckets.get((ix, iy), ()))
    return out


def _query(grid: CellGrid, world: WorldState, i: int, r: float) -> np.ndarray:
    if grid.t != world.t:
        raise StaleGridError(f"grid built at t={grid.t}, world is at t={world.t}")
    cx, cy = grid.cell_of(world.x[i])
    cand = np.array(sorted(_candidates(grid, cx, cy)), dtype=np.int64)
    # same distance expression as the brute-force path
    d = np.hypot(world.x[i, 0] - world.x[cand, 0], world.x[i, 1] - world.x[cand, 1])
    return cand[d <= r]


def grid_neighbor_set(grid: CellGrid, world: WorldState, i: int, r: float) -> frozenset[int]:
    i = _check_index(i, world.n)
    return frozenset(int(j) for j in _query(grid, world, i, r))


def grid_neighbor_lists(grid: CellGrid, world: WorldState, r: float) -> list[np.ndarray]:
    return [_query(grid, world, i, r) for i in range(world.n)]
