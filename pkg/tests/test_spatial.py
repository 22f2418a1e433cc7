import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vicsek_mean.model import WorldState, neighbor_lists, neighbor_set
from vicsek_mean.spatial import StaleGridError, build_grid, grid_neighbor_lists, grid_neighbor_set

B, R = 40.0, 8.0


def world(x, t=0):
    x = np.array(x, dtype=float)
    return WorldState(np.zeros(len(x)), x, t)


def test_single_agent_at_origin():
    g = build_grid(world([(0, 0)]), R, B)
    assert g.buckets == {(0, 0): (0,)}
    assert g.grid_dims == (5, 5)


def test_far_corner_goes_to_last_cell():
    g = build_grid(world([(40, 40), (40, 0)]), R, B)
    assert g.buckets == {(4, 4): (0,), (4, 0): (1,)}


def test_buckets_partition_indices():
    rng = np.random.default_rng(0)
    w = world(rng.uniform(0, B, (100, 2)))
    g = build_grid(w, R, B)
    members = [i for b in g.buckets.values() for i in b]
    assert sorted(members) == list(range(100))
    assert all(0 <= cx < 5 and 0 <= cy < 5 for cx, cy in g.buckets)


def test_same_cell_but_out_of_range():
    w = world([(0.1, 0.1), (7.9, 7.9)])
    g = build_grid(w, R, B)
    assert g.cell_of(w.x[0]) == g.cell_of(w.x[1]) == (0, 0)
    assert grid_neighbor_set(g, w, 0, 8.0 - 0.5) == {0}


def test_stale_grid_is_rejected():
    w = world([(1, 1), (2, 2)])
    g = build_grid(w, R, B)
    with pytest.raises(StaleGridError):
        grid_neighbor_set(g, world([(1, 1), (2, 2)], t=1), 0, R)


def test_grid_requires_radius_below_side():
    with pytest.raises(ValueError):
        build_grid(world([(1, 1)]), 50.0, B)


pts = st.lists(st.tuples(st.floats(0, B), st.floats(0, B)), min_size=1, max_size=3)


@given(pts, st.floats(0.5, 39.5))
def test_small_worlds_match_naive(x, r):
    w = world(x)
    g = build_grid(w, r, B)
    for i in range(w.n):
        assert grid_neighbor_set(g, w, i, r) == neighbor_set(w, i, r)


@given(st.integers(0, 2**32 - 1))
def test_grid_lists_match_naive_lists(seed):
    rng = np.random.default_rng(seed)
    w = world(rng.uniform(0, B, (30, 2)))
    g = build_grid(w, R, B)
    for a, b in zip(grid_neighbor_lists(g, w, R), neighbor_lists(w, R)):
        assert np.array_equal(np.sort(a), np.sort(b))
