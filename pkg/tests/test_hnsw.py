import numpy as np
import pytest
from scipy import stats

from spatialmem import DimensionError, DuplicateIdError, EmptyIndexError
from spatialmem.hnsw import HnswIndex


def clustered_data(rng, n, dim, clusters=20, jitter=0.1):
    centers = rng.normal(size=(clusters, dim))
    assign = rng.integers(0, clusters, size=n)
    return centers[assign] + jitter * rng.normal(size=(n, dim)), centers


def test_empty_index_raises():
    idx = HnswIndex(dim=4)
    with pytest.raises(EmptyIndexError):
        idx.search(np.ones(4), 1)
    assert idx.linear_scan(np.ones(4), 1) == []


def test_single_element_always_returned(rng):
    idx = HnswIndex(dim=8)
    v = rng.normal(size=8)
    idx.insert("only", v)
    for _ in range(5):
        out = idx.search(rng.normal(size=8), 3)
        assert [e for e, _ in out] == ["only"]


def test_self_query_ranked_first(rng):
    idx = HnswIndex(dim=16, seed=3)
    vecs = rng.normal(size=(200, 16))
    for i in range(200):
        idx.insert(i, vecs[i])
    for i in (0, 17, 199):
        out = idx.search(vecs[i], 3)
        assert out[0][0] == i
        assert out[0][1] <= 1e-6


def test_duplicate_insert_rejected(rng):
    idx = HnswIndex(dim=4)
    idx.insert("a", rng.normal(size=4))
    with pytest.raises(DuplicateIdError):
        idx.insert("a", rng.normal(size=4))


def test_dimension_mismatch(rng):
    idx = HnswIndex(dim=4)
    with pytest.raises(DimensionError):
        idx.insert("a", rng.normal(size=5))
    idx.insert("a", rng.normal(size=4))
    with pytest.raises(DimensionError):
        idx.search(rng.normal(size=5), 1)


def test_linear_scan_matches_full_sort(rng):
    idx = HnswIndex(dim=8)
    vecs = rng.normal(size=(100, 8))
    for i in range(100):
        idx.insert(i, vecs[i])
    q = rng.normal(size=8)
    got = idx.linear_scan(q, 10)
    qn = q / np.linalg.norm(q)
    vn = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    dists = 1.0 - vn @ qn
    expected = np.argsort(dists, kind="stable")[:10]
    assert [e for e, _ in got] == list(expected)


def test_recall_on_clustered_data(rng):
    data, centers = clustered_data(rng, 2000, 32)
    idx = HnswIndex(dim=32, M=16, ef_construction=100, ef_search=100, seed=0)
    for i in range(2000):
        idx.insert(i, data[i])
    hits = total = 0
    for _ in range(100):
        q = centers[rng.integers(len(centers))] + 0.1 * rng.normal(size=32)
        approx = {e for e, _ in idx.search(q, 3)}
        exact = {e for e, _ in idx.linear_scan(q, 3)}
        hits += len(approx & exact)
        total += len(exact)
    assert hits / total >= 0.9


def test_layer0_connected(rng):
    idx = HnswIndex(dim=16, seed=1)
    for i, v in enumerate(rng.normal(size=(500, 16))):
        idx.insert(i, v)
    assert idx.layer0_connected()


def test_level_distribution_geometric():
    """P[level >= l] should decay like M^-l (chi-squared at 5%)."""
    idx = HnswIndex(dim=4, M=16, seed=42)
    n = 10000
    rng = np.random.default_rng(0)
    for i, v in enumerate(rng.normal(size=(n, 4))):
        idx.insert(i, v)
    levels = idx.levels()
    observed = np.array([np.sum(levels == 0), np.sum(levels == 1),
                         np.sum(levels >= 2)])
    p0 = 1 - 1 / 16
    p1 = (1 / 16) * (1 - 1 / 16)
    expected = np.array([p0, p1, 1 - p0 - p1]) * n
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    assert chi2 < stats.chi2.ppf(0.95, df=2)


def test_rebuild_is_bit_identical(rng):
    vecs = rng.normal(size=(300, 8))

    def build():
        idx = HnswIndex(dim=8, M=8, ef_construction=50, ef_search=50, seed=5)
        for i in range(300):
            idx.insert(i, vecs[i])
        return idx

    a, b = build(), build()
    assert np.array_equal(a.levels(), b.levels())
    for (adj_a, deg_a), (adj_b, deg_b) in zip(a.graph_state(), b.graph_state()):
        assert np.array_equal(deg_a, deg_b)
        assert np.array_equal(adj_a, adj_b)


def test_upsert_replaces_vector(rng):
    idx = HnswIndex(dim=8, seed=2)
    v1, v2 = rng.normal(size=8), rng.normal(size=8)
    idx.insert("a", v1)
    idx.insert("b", rng.normal(size=8))
    idx.upsert("a", v2)
    assert len(idx) == 2
    out = idx.search(v2, 1)
    assert out[0][0] == "a"
    assert out[0][1] <= 1e-6
    # the tombstoned copy never surfaces
    scan = idx.linear_scan(v1, 2)
    assert len(scan) == 2


def test_neighbor_caps_respected(rng):
    idx = HnswIndex(dim=8, M=4, layer0_cap_factor=2, ef_construction=32,
                    seed=0)
    for i, v in enumerate(rng.normal(size=(400, 8))):
        idx.insert(i, v)
    counts = idx.neighbor_counts()
    assert counts[0].max() <= 8          # layer 0: 2*M
    for level, deg in counts.items():
        if level > 0:
            assert deg.max() <= 4        # upper layers: M
