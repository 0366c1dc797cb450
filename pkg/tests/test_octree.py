import numpy as np
import pytest

from spatialmem import EngineConfig, OutOfWorldError, RevBlockParams
from spatialmem.octree import SparseOctree


@pytest.fixture
def octree(small_cfg, rng):
    params = RevBlockParams.init(small_cfg.d, small_cfg.d, 2, 0.05, rng)
    return SparseOctree(small_cfg, params, rng)


def test_write_creates_leaf(octree, small_cfg, rng):
    v = rng.normal(size=small_cfg.d)
    key = octree.write([10.0, 20.0, 30.0], v)
    assert len(octree) == 1
    leaf = octree.get(key)
    assert leaf.key == key
    assert leaf.write_count == 1
    assert leaf.token.depth == 1


def test_same_cell_updates_in_place(octree, small_cfg, rng):
    side = small_cfg.leaf_size
    base = np.array([10.0, 20.0, 30.0])
    k1 = octree.write(base, rng.normal(size=small_cfg.d))
    # A second point inside the same leaf cube maps to the same key.
    k2 = octree.write(base + 0.25 * side, rng.normal(size=small_cfg.d))
    assert k1 == k2
    assert len(octree) == 1
    assert octree.get(k1).write_count == 2
    assert octree.get(k1).token.depth == 2


def test_distinct_cells_make_distinct_leaves(octree, small_cfg, rng):
    k1 = octree.write([10.0, 20.0, 30.0], rng.normal(size=small_cfg.d))
    k2 = octree.write([110.0, 20.0, 30.0], rng.normal(size=small_cfg.d))
    assert k1 != k2
    assert len(octree) == 2


def test_lookup_by_position(octree, small_cfg, rng):
    octree.write([10.0, 20.0, 30.0], rng.normal(size=small_cfg.d))
    leaf = octree.lookup([10.0, 20.0, 30.0])
    assert leaf is not None
    assert octree.lookup([200.0, 200.0, 200.0]) is None


def test_out_of_world_write_rejected(octree, small_cfg, rng):
    with pytest.raises(OutOfWorldError):
        octree.write([small_cfg.L, 0.0, 0.0], rng.normal(size=small_cfg.d))


def test_leaf_bounds_contain_position(octree, small_cfg, rng):
    p = np.array([13.7, 41.2, 99.9])
    key = octree.write(p, rng.normal(size=small_cfg.d))
    leaf = octree.get(key)
    assert np.all(leaf.bounds_min <= p)
    assert np.all(p < leaf.bounds_min + leaf.side)


def test_leaves_in_insertion_order(octree, small_cfg, rng):
    keys = [octree.write([float(10 * i + 1), 5.0, 5.0],
                         rng.normal(size=small_cfg.d))
            for i in range(5)]
    assert [leaf.key for leaf in octree.leaves()] == keys


def test_snapshots_are_stable(octree, small_cfg, rng):
    """A held leaf reference is unaffected by later writes to the cell."""
    key = octree.write([10.0, 20.0, 30.0], rng.normal(size=small_cfg.d))
    before = octree.get(key)
    octree.write([10.0, 20.0, 30.0], rng.normal(size=small_cfg.d))
    assert before.write_count == 1
    assert before.token.depth == 1
    assert octree.get(key).write_count == 2


def test_token_recovers_write(octree, small_cfg, rng):
    v = rng.normal(size=small_cfg.d)
    key = octree.write([10.0, 20.0, 30.0], v)
    recovered = octree.get(key).token.unroll(octree.params, 1)[0]
    assert np.max(np.abs(recovered - v)) < 1e-9
