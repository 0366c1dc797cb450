import numpy as np
import pytest

import spatialmem_bindings as sb
from spatialmem import EngineConfig, MemoryStore

# Small world with a raised exact-search threshold: interleaved
# write/retrieve replay stays on the exact path instead of rebuilding the
# approximate index after every write.
CFG = {"d": 32, "L": 64.0, "Lambda": 4, "exact_search_threshold": 4096}


def test_create_write_retrieve_round_trip():
    with sb.BoundStore(CFG) as store:
        rng = np.random.default_rng(0)
        v = rng.normal(size=32).tolist()
        receipt = store.write(v, [10.0, 10.0, 10.0], object_id="cup")
        assert receipt["step"] == 1
        assert receipt["leaf_created"] is True
        result = store.retrieve(v, [10.0, 10.0, 10.0])
        assert result["source"] == "stm"
        assert result["items"][0]["similarity"] == pytest.approx(1.0)


def test_cross_boundary_replay_matches_native():
    """1000 interleaved write/retrieve pairs: bound results equal native
    results number-for-number (both sides are IEEE doubles)."""
    cfg = EngineConfig.from_dict(CFG)
    native = MemoryStore(cfg)
    bound = sb.BoundStore(CFG)
    rng = np.random.default_rng(1)
    for i in range(1000):
        v = rng.normal(size=32)
        p = rng.uniform(0, 64.0, size=3)
        oid = f"obj{i % 50}" if i % 3 == 0 else None
        native_receipt = native.write(v, p, object_id=oid)
        bound_receipt = bound.write(v.tolist(), p.tolist(), object_id=oid)
        assert bound_receipt["leaf_key"] == native_receipt.leaf_key
        assert bound_receipt["node_id"] == native_receipt.node_id
        assert bound_receipt["stm_evicted"] == native_receipt.stm_evicted

        qv = rng.normal(size=32)
        qp = rng.uniform(0, 64.0, size=3)
        a = native.retrieve(qv, qp)
        b = bound.retrieve(qv.tolist(), qp.tolist())
        assert b["source"] == a.source
        assert len(b["items"]) == len(a.items)
        for got, want in zip(b["items"], a.items):
            assert got["similarity"] == want.similarity
            assert got["embedding"] == list(map(float, want.embedding))
            assert got["position"] == list(map(float, want.position))
        assert b["aggregate"] == list(map(float, a.aggregate))
    assert bound.stats() == native.stats()
    bound.close()


def test_dimension_error_is_structured():
    with sb.BoundStore(CFG) as store:
        with pytest.raises(sb.BindingError) as exc:
            store.write([1.0, 2.0], [0.0, 0.0, 0.0])
        assert exc.value.code == "dimension_mismatch"
        assert exc.value.field is not None


def test_empty_store_error_code():
    with sb.BoundStore(CFG) as store:
        with pytest.raises(sb.BindingError) as exc:
            store.retrieve([0.0] * 32, [0.0, 0.0, 0.0])
        assert exc.value.code == "empty_store"


def test_bad_config_error_code():
    with pytest.raises(sb.BindingError) as exc:
        sb.bind_create({"d": -1})
    assert exc.value.code == "bad_config"


def test_bad_store_file_error_code(tmp_path):
    path = tmp_path / "bogus.bin"
    path.write_bytes(b"not a store at all")
    with pytest.raises(sb.BindingError) as exc:
        sb.bind_load(path)
    assert exc.value.code == "bad_store_file"


def test_save_load_preserves_results(tmp_path):
    rng = np.random.default_rng(2)
    store = sb.BoundStore(CFG)
    for i in range(50):
        store.write(rng.normal(size=32).tolist(),
                    rng.uniform(0, 64.0, size=3).tolist(),
                    object_id=f"o{i}" if i % 4 == 0 else None)
    path = tmp_path / "store.bin"
    assert store.save(path) == path.stat().st_size
    loaded = sb.BoundStore.load(path)
    for _ in range(20):
        v = rng.normal(size=32).tolist()
        p = rng.uniform(0, 64.0, size=3).tolist()
        assert loaded.retrieve(v, p) == store.retrieve(v, p)
    store.close()
    loaded.close()


def test_config_echo():
    with sb.BoundStore(CFG) as store:
        echo = store.config()
        assert echo["d"] == 32
        assert echo["L"] == 64.0


def test_double_close_is_noop_and_closed_handle_rejected():
    store = sb.BoundStore(CFG)
    store.close()
    store.close()  # no-op
    with pytest.raises(sb.BindingError) as exc:
        store.stats()
    assert exc.value.code == "invalid_handle"
