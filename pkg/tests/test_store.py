import numpy as np
import pytest

from spatialmem import (DimensionError, EmptyStoreError, EngineConfig,
                        FeatureFlags, MemoryStore)


@pytest.fixture
def store(small_cfg):
    return MemoryStore(small_cfg)


def test_write_receipt(store, small_cfg, rng):
    r = store.write(rng.normal(size=small_cfg.d), [10.0, 20.0, 30.0],
                    object_id="cup")
    assert r.leaf_created
    assert r.node_created
    assert r.step == 1
    assert r.stm_evicted is None
    assert store.stats()["stm_entries"] == 1


def test_write_without_object_id_skips_cache(store, small_cfg, rng):
    store.write(rng.normal(size=small_cfg.d), [10.0, 20.0, 30.0])
    assert store.stats()["stm_entries"] == 0


def test_write_rejects_bad_embedding(store):
    with pytest.raises(DimensionError):
        store.write(np.zeros(3), [10.0, 20.0, 30.0])


def test_retrieve_empty_store_raises(store, small_cfg, rng):
    with pytest.raises(EmptyStoreError):
        store.retrieve(rng.normal(size=small_cfg.d), [1.0, 1.0, 1.0])


def test_stm_hit_on_repeat_query(store, small_cfg, rng):
    """Same v at the same position with an object id comes back from the
    cache with similarity 1."""
    v = rng.normal(size=small_cfg.d)
    p = [10.0, 20.0, 30.0]
    store.write(v, p, object_id="cup")
    result = store.retrieve(v, p)
    assert result.source == "stm"
    assert result.items[0].similarity == pytest.approx(1.0)
    assert np.allclose(result.items[0].position, p)


def test_orthogonal_query_routes_to_ltm(store, small_cfg, rng):
    v = np.zeros(small_cfg.d)
    v[0] = 1.0
    store.write(v, [10.0, 20.0, 30.0], object_id="cup")
    q = np.zeros(small_cfg.d)
    q[1] = 1.0  # similarity 0 < tau
    result = store.retrieve(q, [10.0, 20.0, 30.0])
    assert result.source == "ltm"


def test_distant_query_routes_to_ltm(store, small_cfg, rng):
    v = rng.normal(size=small_cfg.d)
    store.write(v, [10.0, 20.0, 30.0], object_id="cup")
    result = store.retrieve(v, [200.0, 200.0, 200.0])
    assert result.source == "ltm"


def test_ltm_decodes_written_embedding(store, small_cfg, rng):
    v = rng.normal(size=small_cfg.d)
    store.write(v, [10.0, 20.0, 30.0])
    result = store.retrieve(v, [10.0, 20.0, 30.0])
    assert result.source == "ltm"
    best = result.items[0]
    assert np.max(np.abs(best.embedding - v)) < 1e-8


def test_aggregate_is_mean(store, small_cfg, rng):
    for i in range(4):
        store.write(rng.normal(size=small_cfg.d),
                    [10.0 + 40 * i, 20.0, 30.0])
    result = store.retrieve(rng.normal(size=small_cfg.d), [10.0, 20.0, 30.0])
    stacked = np.stack([it.embedding for it in result.items])
    assert np.allclose(result.aggregate, stacked.mean(axis=0))


def test_feature_flags_disable_components(small_cfg, rng):
    store = MemoryStore(small_cfg, FeatureFlags(graph=False, stm=False))
    v = rng.normal(size=small_cfg.d)
    store.write(v, [10.0, 20.0, 30.0], object_id="cup")
    s = store.stats()
    assert s["graph_nodes"] == 0
    assert s["stm_entries"] == 0
    assert store.retrieve(v, [10.0, 20.0, 30.0]).source == "ltm"

    no_ltm = MemoryStore(small_cfg, FeatureFlags(ltm=False, stm=False))
    no_ltm.write(v, [10.0, 20.0, 30.0])
    assert no_ltm.retrieve(v, [10.0, 20.0, 30.0]).source == "none"


def test_token_vectors_order_and_shape(store, small_cfg, rng):
    store.write(rng.normal(size=small_cfg.d), [10.0, 20.0, 30.0])
    store.write(rng.normal(size=small_cfg.d), [100.0, 20.0, 30.0])
    tv = store.token_vectors()
    assert tv.shape == (len(store._registry), 2 * small_cfg.d)


def test_project_query_layout(store, small_cfg, rng):
    v = rng.normal(size=small_cfg.d)
    q = store.project_query(v, [10.0, 20.0, 30.0])
    assert q.shape == (2 * small_cfg.d,)
    assert np.array_equal(q[small_cfg.d:], v)


def test_exact_search_agrees_with_index(small_cfg, rng):
    """Below the exactness threshold, retrieval uses the exact scan; the
    approximate index must return the same top hit on easy queries."""
    store = MemoryStore(small_cfg)
    writes = []
    for i in range(50):
        v = rng.normal(size=small_cfg.d)
        p = [float(1 + 5 * i), 20.0, 30.0]
        store.write(v, p)
        writes.append((v, p))
    for v, p in writes[:10]:
        q = store.project_query(v, p)
        exact = store._exact_search(q, 1)
        approx = store._ensure_index().search(q, 1)
        assert exact[0][0] == approx[0][0]


def test_end_to_end_recall(small_cfg, rng):
    """Writing distinct observations then querying with each original pair
    recovers the matching element within the top-m."""
    store = MemoryStore(small_cfg)
    writes = []
    for i in range(300):
        v = rng.normal(size=small_cfg.d)
        p = rng.uniform(0, small_cfg.L, size=3)
        store.write(v, p)
        writes.append((v, p, store._registry[-2:]))
    hits = 0
    sample = rng.choice(len(writes), size=100, replace=False)
    for i in sample:
        v, p, _ = writes[i]
        result = store.retrieve(v, p)
        if result.source == "ltm" and any(
                np.max(np.abs(it.embedding - v)) < 1e-6 for it in result.items):
            hits += 1
    assert hits >= 90


def test_stats_keys(store, small_cfg, rng):
    store.write(rng.normal(size=small_cfg.d), [10.0, 20.0, 30.0])
    s = store.stats()
    for key in ("steps", "octree_leaves", "graph_nodes", "graph_edges",
                "stm_entries", "ltm_elements", "embedding_dim"):
        assert key in s
