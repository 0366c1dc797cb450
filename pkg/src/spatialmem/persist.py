"""Binary snapshot format for the memory store.

Layout: 4-byte magic, u16 format version, then a length-prefixed JSON
config block followed by binary sections for the coupling parameters,
decoders, octree leaves, graph, short-term cache, and element registry.
A CRC-32 of everything before it closes the file; load refuses files
with a bad magic, an unknown version, a mismatched checksum, or missing
bytes.  The nearest-neighbor index is not stored — it is a deterministic
function of the element set and is rebuilt on demand.
"""

import io
import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .config import EngineConfig
from .errors import (BadChecksumError, BadMagicError, TruncatedFileError,
                     UnsupportedVersionError)
from .graph import GraphEdge, GraphNode
from .octree import OctreeLeaf
from .reversible import DecoderSet, ResidualMLP, RevBlockParams, TokenChain
from .stm import StmEntry

MAGIC = b"SMEM"
VERSION = 1


# -- primitive writers/readers ----------------------------------------------

def _w(buf, fmt, *vals):
    buf.write(struct.pack(fmt, *vals))


def _w_bytes(buf, data: bytes):
    _w(buf, "<I", len(data))
    buf.write(data)


def _w_str(buf, s: str):
    _w_bytes(buf, s.encode("utf-8"))


def _w_array(buf, a: np.ndarray):
    a = np.ascontiguousarray(a, dtype=np.float64)
    _w(buf, "<B", a.ndim)
    for dim in a.shape:
        _w(buf, "<I", dim)
    buf.write(a.tobytes())


class _Reader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def take(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise TruncatedFileError("unexpected end of file")
        out = self._data[self._pos:self._pos + n]
        self._pos += n
        return out

    def u(self, fmt: str):
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size))[0]

    def str_(self) -> str:
        return self.take(self.u("<I")).decode("utf-8")

    def array(self) -> np.ndarray:
        ndim = self.u("<B")
        shape = tuple(self.u("<I") for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        raw = self.take(8 * count)
        return np.frombuffer(raw, dtype=np.float64).reshape(shape).copy()

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._data)


# -- composite sections -----------------------------------------------------

def _w_mlp(buf, mlp: ResidualMLP):
    for _, param in mlp.param_items():
        _w_array(buf, param)


def _r_mlp(r: _Reader) -> ResidualMLP:
    return ResidualMLP(A=r.array(), b=r.array(), W1=r.array(),
                       b1=r.array(), W2=r.array())


def _w_token(buf, token: TokenChain):
    _w(buf, "<I", token.depth)
    _w_array(buf, token.h1)
    _w_array(buf, token.h2)
    for spare in token.spares:
        _w_array(buf, spare)


def _r_token(r: _Reader) -> TokenChain:
    depth = r.u("<I")
    h1 = r.array()
    h2 = r.array()
    spares = tuple(r.array() for _ in range(depth))
    return TokenChain(h1=h1, h2=h2, depth=depth, spares=spares)


# -- public API -------------------------------------------------------------

def save(store, path) -> int:
    """Write a snapshot of the store; returns the number of bytes."""
    buf = io.BytesIO()
    buf.write(MAGIC)
    _w(buf, "<H", VERSION)
    _w_str(buf, json.dumps(store.cfg.to_dict()))
    _w(buf, "<3B", int(store.features.graph), int(store.features.ltm),
       int(store.features.stm))
    _w(buf, "<Q", store.step)

    _w(buf, "<I", len(store.params.layers))
    for F, G in store.params.layers:
        _w_mlp(buf, F)
        _w_mlp(buf, G)

    dec = store.decoders
    _w_str(buf, dec.mode)
    _w(buf, "<d", dec.pos_stamp_scale)
    _w(buf, "<B", int(dec.trained))
    _w_mlp(buf, dec.pi_p)
    _w_mlp(buf, dec.pi_d)
    _w_mlp(buf, dec.pi_v)

    _w_array(buf, store._pos_proj)

    leaves = store.octree.leaves()
    _w(buf, "<I", len(leaves))
    for leaf in leaves:
        _w(buf, "<Q", leaf.key)
        _w(buf, "<I", leaf.write_count)
        _w_token(buf, leaf.token)

    graph = store.graph
    _w(buf, "<I", len(graph.nodes))
    for node in graph.nodes:
        _w_array(buf, node.position)
        _w_array(buf, node.descriptor)
        _w(buf, "<I", node.visit_count)
        _w_token(buf, node.token)
    _w(buf, "<I", len(graph.edges))
    for (src, dst), edge in graph.edges.items():
        _w(buf, "<iidI", src, dst, edge.weight, edge.observation_count)
    _w(buf, "<i", -1 if graph.current is None else graph.current)

    entries = store.stm.entries()
    _w(buf, "<I", len(entries))
    for e in entries:
        _w_str(buf, e.object_id)
        _w_array(buf, e.position_abs)
        _w_array(buf, e.embedding)
        _w(buf, "<qIQ", e.timestamp, e.freq, e.seq)
    _w(buf, "<Q", store.stm._seq)

    _w(buf, "<I", len(store._registry))
    for kind, key in store._registry:
        _w(buf, "<BQ", 0 if kind == "leaf" else 1, key)

    payload = buf.getvalue()
    blob = payload + struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF)
    Path(path).write_bytes(blob)
    return len(blob)


def load(path):
    from .store import FeatureFlags, MemoryStore

    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 2 + 4:
        raise TruncatedFileError(f"{path}: file too short")
    if data[:len(MAGIC)] != MAGIC:
        raise BadMagicError(f"{path}: not a memory snapshot")
    payload, stored_crc = data[:-4], struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(payload) & 0xFFFFFFFF != stored_crc:
        raise BadChecksumError(f"{path}: checksum mismatch")

    r = _Reader(payload)
    r.take(len(MAGIC))
    version = r.u("<H")
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: format version {version}")

    cfg = EngineConfig.from_dict(json.loads(r.str_()))
    g, l, s = (r.u("<B") for _ in range(3))
    store = MemoryStore(cfg, FeatureFlags(graph=bool(g), ltm=bool(l),
                                          stm=bool(s)))
    store.step = r.u("<Q")

    num_layers = r.u("<I")
    store.params = RevBlockParams(
        layers=[(_r_mlp(r), _r_mlp(r)) for _ in range(num_layers)], d=cfg.d)
    store.octree.params = store.params
    store.graph.params = store.params

    mode = r.str_()
    pos_stamp_scale = r.u("<d")
    trained = bool(r.u("<B"))
    store.decoders = DecoderSet(pi_p=_r_mlp(r), pi_d=_r_mlp(r), pi_v=_r_mlp(r),
                                mode=mode, pos_stamp_scale=pos_stamp_scale,
                                trained=trained)
    store._pos_proj = r.array()

    from . import morton
    for _ in range(r.u("<I")):
        key = r.u("<Q")
        write_count = r.u("<I")
        token = _r_token(r)
        corner, side = morton.cell_bounds(key, cfg)
        store.octree.restore(OctreeLeaf(key=key, token=token,
                                        bounds_min=corner, side=side,
                                        write_count=write_count))

    for node_id in range(r.u("<I")):
        position = r.array()
        descriptor = r.array()
        visit_count = r.u("<I")
        token = _r_token(r)
        store.graph.nodes.append(GraphNode(id=node_id, position=position,
                                           descriptor=descriptor, token=token,
                                           visit_count=visit_count))
    if store.graph.nodes:
        store.graph._descriptors = np.stack(
            [n.descriptor for n in store.graph.nodes])
    for _ in range(r.u("<I")):
        src, dst, weight, count = (r.u("<i"), r.u("<i"), r.u("<d"), r.u("<I"))
        store.graph.edges[(src, dst)] = GraphEdge(src, dst, weight, count)
    current = r.u("<i")
    store.graph.current = None if current < 0 else current

    for _ in range(r.u("<I")):
        object_id = r.str_()
        position_abs = r.array()
        embedding = r.array()
        timestamp, freq, seq = r.u("<q"), r.u("<I"), r.u("<Q")
        store.stm._entries[object_id] = StmEntry(
            object_id=object_id, position_abs=position_abs,
            embedding=embedding, timestamp=timestamp, freq=freq, seq=seq)
    store.stm._seq = r.u("<Q")

    registry = []
    for _ in range(r.u("<I")):
        kind = "leaf" if r.u("<B") == 0 else "node"
        registry.append((kind, r.u("<Q")))
    store._registry = registry
    store._registered = set(registry)
    store._index = None
    store._index_dirty = True
    if not r.exhausted:
        raise TruncatedFileError(f"{path}: trailing bytes after snapshot")
    return store
