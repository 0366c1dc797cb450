"""Top-level memory store: octree + graph + short/long-term retrieval.

Writes fan out to every enabled component; reads follow the cache-first
policy: radius-filtered cache retrieval when the best similarity clears
the threshold, otherwise an approximate nearest-neighbor lookup over all
token states with reversible decoding of the hits.

The token index is maintained as a deterministic function of the current
element set: it is rebuilt lazily (in element creation order, from one
fixed seed) whenever writes have occurred, and an exact linear scan is
used below a size threshold.  This keeps retrieval results identical
between a live store and one reloaded from disk.
"""

from dataclasses import dataclass, field

import numpy as np

from .attention import gated_attention_fuse, sigmoid_gate, softmax_attention
from .config import EngineConfig
from .core import as_embedding, cosine_similarity, normalize_position
from .errors import EmptyStoreError
from .graph import SemanticGraph
from .hnsw import HnswIndex
from .octree import SparseOctree
from .reversible import DecoderSet, RevBlockParams
from .stm import StmCache


@dataclass(frozen=True)
class FeatureFlags:
    """Component toggles used by the ablation protocol."""

    graph: bool = True
    ltm: bool = True
    stm: bool = True


@dataclass(frozen=True)
class WriteReceipt:
    leaf_key: int
    leaf_created: bool
    node_id: int | None
    node_created: bool
    stm_evicted: str | None
    step: int


@dataclass(frozen=True)
class RetrievedItem:
    embedding: np.ndarray
    position: np.ndarray
    descriptor: np.ndarray
    similarity: float


@dataclass(frozen=True)
class RetrievalResult:
    source: str                  # "stm" | "ltm" | "none"
    items: list
    aggregate: np.ndarray


class MemoryStore:
    def __init__(self, cfg: EngineConfig, features: FeatureFlags = FeatureFlags()):
        self.cfg = cfg
        self.features = features
        # Independent deterministic streams so that persistence can
        # regenerate the derived state without replaying token draws.
        params_rng = np.random.default_rng([cfg.rng_seed, 0])
        proj_rng = np.random.default_rng([cfg.rng_seed, 1])
        token_rng = np.random.default_rng([cfg.rng_seed, 2])
        decoder_rng = np.random.default_rng([cfg.rng_seed, 3])

        self.params = RevBlockParams.init(cfg.d, cfg.rev_hidden_dim,
                                          cfg.rev_layers, cfg.rev_init_scale,
                                          params_rng)
        # Query projection: identity on the embedding half, seeded random
        # code for the position half.  A fully random map would decorrelate
        # queries from token states and ruin recall.
        self._pos_proj = proj_rng.normal(0.0, 1.0 / np.sqrt(3), size=(cfg.d, 3))
        self.decoders = DecoderSet.init(cfg.d, cfg.decoder_hidden, decoder_rng,
                                        mode=cfg.decoder_mode,
                                        pos_stamp_scale=cfg.pos_stamp_scale)
        self._token_rng = token_rng
        self.octree = SparseOctree(cfg, self.params, token_rng)
        self.graph = SemanticGraph(cfg, self.params, token_rng)
        self.stm = StmCache(cfg)
        self.step = 0

        self._registry: list[tuple[str, int]] = []   # creation order
        self._registered: set[tuple[str, int]] = set()
        self._index: HnswIndex | None = None
        self._index_dirty = True

    # -- write path ---------------------------------------------------------

    def write(self, v, p, object_id: str | None = None,
              c_instr: float = 0.0) -> WriteReceipt:
        v = as_embedding(v, self.cfg.d)
        leaf_count = len(self.octree)
        leaf_key = self.octree.write(p, v)
        leaf_created = len(self.octree) > leaf_count
        self._register(("leaf", leaf_key))

        node_id, node_created = None, False
        if self.features.graph:
            node_id, node_created = self.graph.observe(v, p, c_instr)
            self._register(("node", node_id))

        evicted = None
        if object_id is not None and self.features.stm:
            p_norm = normalize_position(p, self.cfg)
            report = self.stm.insert(object_id, p_norm, v, self.step)
            evicted = report.object_id if report is not None else None

        self.step += 1
        self._index_dirty = True
        return WriteReceipt(leaf_key=leaf_key, leaf_created=leaf_created,
                            node_id=node_id, node_created=node_created,
                            stm_evicted=evicted, step=self.step)

    def _register(self, element: tuple[str, int]) -> None:
        if element not in self._registered:
            self._registered.add(element)
            self._registry.append(element)

    # -- token access -------------------------------------------------------

    def _token_of(self, element: tuple[str, int]):
        kind, key = element
        if kind == "leaf":
            return self.octree.get(key).token
        return self.graph.nodes[key].token

    def token_vectors(self) -> np.ndarray:
        """Current 2d token states in element creation order."""
        if not self._registry:
            return np.empty((0, 2 * self.cfg.d))
        return np.stack([self._token_of(e).state for e in self._registry])

    # -- query projection ---------------------------------------------------

    def project_query(self, v, p) -> np.ndarray:
        v = as_embedding(v, self.cfg.d)
        p_norm = normalize_position(p, self.cfg)
        pos_code = self.cfg.proj_pos_scale * (self._pos_proj @ (p_norm / self.cfg.L))
        return np.concatenate([pos_code, v])

    # -- index management ---------------------------------------------------

    def _ensure_index(self) -> HnswIndex:
        if self._index is None or self._index_dirty:
            index = HnswIndex(dim=2 * self.cfg.d, M=self.cfg.hnsw_M,
                              ef_construction=self.cfg.hnsw_efConstruction,
                              ef_search=self.cfg.hnsw_efSearch,
                              layer0_cap_factor=self.cfg.layer0_cap_factor,
                              seed=self.cfg.rng_seed)
            vectors = self.token_vectors()
            for element, vec in zip(self._registry, vectors):
                index.insert(element, vec)
            self._index = index
            self._index_dirty = False
        return self._index

    def index_search(self, query: np.ndarray, k: int) -> list[tuple[tuple, float]]:
        """Top-k elements by cosine distance over token states.

        Exact below the size threshold, HNSW beyond it.
        """
        n = len(self._registry)
        if n == 0:
            return []
        if n <= self.cfg.exact_search_threshold:
            return self._exact_search(query, k)
        return self._ensure_index().search(query, k)

    def _exact_search(self, query, k):
        vectors = self.token_vectors()
        norms = np.linalg.norm(vectors, axis=1)
        norms[norms == 0.0] = 1.0
        qn = np.linalg.norm(query)
        q = query / qn if qn > 0 else query
        dists = 1.0 - (vectors / norms[:, None]) @ q
        order = np.lexsort((np.arange(len(dists)), dists))[:k]
        return [(self._registry[i], float(dists[i])) for i in order]

    # -- read path ----------------------------------------------------------

    def retrieve(self, v_now, p_now) -> RetrievalResult:
        if self.step == 0:
            raise EmptyStoreError("retrieve on a store with no writes")
        v_now = as_embedding(v_now, self.cfg.d)
        p_norm = normalize_position(p_now, self.cfg)

        if self.features.stm:
            reference = self.graph.current_position()
            if reference is None:
                reference = np.zeros(3)
            hits = self.stm.retrieve(v_now, p_norm, reference)
            if hits and hits[0][1] >= self.cfg.tau_sim:
                items = [RetrievedItem(embedding=e.embedding,
                                       position=e.position_abs,
                                       descriptor=e.embedding,
                                       similarity=s)
                         for e, s in hits]
                aggregate = np.mean([it.embedding for it in items], axis=0)
                return RetrievalResult("stm", items, aggregate)

        if not self.features.ltm:
            return RetrievalResult("none", [], np.zeros(self.cfg.d))

        query = self.project_query(v_now, p_now)
        matches = self.index_search(query, self.cfg.m_ltm)
        items = []
        for element, dist in matches:
            token = self._token_of(element)
            steps = min(self.cfg.ltm_unroll_depth, token.depth)
            v_hat = token.unroll(self.params, steps)[0]
            items.append(RetrievedItem(
                embedding=v_hat,
                position=self.decoders.decode_position(v_hat),
                descriptor=self.decoders.decode_descriptor(v_hat),
                similarity=1.0 - dist))
        if not items:
            return RetrievalResult("none", [], np.zeros(self.cfg.d))
        aggregate = np.mean([it.embedding for it in items], axis=0)
        return RetrievalResult("ltm", items, aggregate)

    # -- reporting ----------------------------------------------------------

    def stats(self) -> dict:
        return {
            "steps": self.step,
            "octree_leaves": len(self.octree),
            "graph_nodes": len(self.graph),
            "graph_edges": len(self.graph.edges),
            "stm_entries": len(self.stm),
            "ltm_elements": len(self._registry),
            "embedding_dim": self.cfg.d,
        }

    # -- persistence (implemented in persist.py) ----------------------------

    def save(self, path) -> int:
        from . import persist
        return persist.save(self, path)

    @classmethod
    def load(cls, path) -> "MemoryStore":
        from . import persist
        return persist.load(path)


__all__ = ["MemoryStore", "FeatureFlags", "WriteReceipt", "RetrievedItem",
           "RetrievalResult", "gated_attention_fuse", "softmax_attention",
           "sigmoid_gate"]
