"""Hierarchical navigable small world index over token vectors.

Multi-layer proximity graph: each element draws a top layer from a
geometric distribution (P[level >= l] = M^-l), upper layers provide
long-range jumps, and queries descend greedily before a beam search at the
base layer.  Distance is cosine distance (1 - dot over vectors normalized
at insert).  The beam search itself runs in the compiled kernel when
available.
"""

import math

import numpy as np

from . import kernels
from .errors import DimensionError, DuplicateIdError, EmptyIndexError

_MAX_LEVEL = 48


def _normalize(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        return vec.copy()
    return vec / norm


class HnswIndex:
    def __init__(self, dim: int, M: int = 16, ef_construction: int = 200,
                 ef_search: int = 200, layer0_cap_factor: int = 2,
                 seed: int = 0, backend=None):
        self.dim = dim
        self.M = M
        self.ef_construction = ef_construction
        self.ef_search = ef_search
        self.cap0 = layer0_cap_factor * M
        self._kern = backend if backend is not None else kernels
        self._rng = np.random.default_rng(seed)
        self._inv_log_m = 1.0 / math.log(M)

        self._capacity = 1024
        self._n = 0
        self._vectors = np.zeros((self._capacity, dim))
        self._levels = np.zeros(self._capacity, dtype=np.int32)
        self._tombstone = np.zeros(self._capacity, dtype=bool)
        self._visited = np.full(self._capacity, -1, dtype=np.int64)
        self._epoch = 0
        self._slot_ids: list = []          # slot -> external id
        self._slot_of: dict = {}           # external id -> live slot
        self._layers: list[dict] = []      # per level: {"adj": (cap, deg_cap), "deg": (cap,)}
        self._entry = -1
        self._max_level = -1

    # -- storage management -------------------------------------------------

    def __len__(self) -> int:
        """Number of live (non-tombstoned) elements."""
        return len(self._slot_of)

    @property
    def slot_count(self) -> int:
        return self._n

    def _grow(self) -> None:
        new_cap = self._capacity * 2
        self._vectors = np.vstack([self._vectors, np.zeros((self._capacity, self.dim))])
        self._levels = np.concatenate([self._levels, np.zeros(self._capacity, dtype=np.int32)])
        self._tombstone = np.concatenate([self._tombstone, np.zeros(self._capacity, dtype=bool)])
        self._visited = np.concatenate([self._visited, np.full(self._capacity, -1, dtype=np.int64)])
        for level, layer in enumerate(self._layers):
            deg_cap = self.cap0 if level == 0 else self.M
            layer["adj"] = np.vstack([layer["adj"],
                                      np.zeros((self._capacity, deg_cap), dtype=np.int32)])
            layer["deg"] = np.concatenate([layer["deg"],
                                           np.zeros(self._capacity, dtype=np.int32)])
        self._capacity = new_cap

    def _ensure_layers(self, level: int) -> None:
        while len(self._layers) <= level:
            deg_cap = self.cap0 if len(self._layers) == 0 else self.M
            self._layers.append({
                "adj": np.zeros((self._capacity, deg_cap), dtype=np.int32),
                "deg": np.zeros(self._capacity, dtype=np.int32),
            })

    def _sample_level(self) -> int:
        u = self._rng.random()
        return min(int(-math.log(u) * self._inv_log_m), _MAX_LEVEL)

    def _dist(self, slot: int, query: np.ndarray) -> float:
        return 1.0 - float(self._vectors[slot] @ query)

    def _search_layer(self, query, level, entry_ids, entry_dists, ef):
        self._epoch += 1
        layer = self._layers[level]
        ids, dists = self._kern.search_layer(
            self._vectors, layer["adj"], layer["deg"], query,
            np.asarray(entry_ids, dtype=np.int64),
            np.asarray(entry_dists, dtype=np.float64),
            ef, self._visited, self._epoch)
        order = np.lexsort((ids, dists))
        return ids[order], dists[order]

    # -- mutation -----------------------------------------------------------

    def insert(self, external_id, vector) -> None:
        if external_id in self._slot_of:
            raise DuplicateIdError(f"id {external_id!r} already indexed")
        self._insert_slot(external_id, vector)

    def upsert(self, external_id, vector) -> None:
        """Replace an id's vector by tombstoning its old slot."""
        old = self._slot_of.pop(external_id, None)
        if old is not None:
            self._tombstone[old] = True
        self._insert_slot(external_id, vector)

    def _insert_slot(self, external_id, vector) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DimensionError("index vector", self.dim, int(vec.size))
        if self._n >= self._capacity:
            self._grow()
        slot = self._n
        self._n += 1
        self._vectors[slot] = _normalize(vec)
        self._slot_ids.append(external_id)
        self._slot_of[external_id] = slot

        level = self._sample_level()
        self._levels[slot] = level
        self._ensure_layers(level)

        if self._entry < 0:
            self._entry = slot
            self._max_level = level
            return

        query = self._vectors[slot]
        cur = self._entry
        cur_dist = self._dist(cur, query)
        for lv in range(self._max_level, level, -1):
            ids, dists = self._search_layer(query, lv, [cur], [cur_dist], 1)
            cur, cur_dist = int(ids[0]), float(dists[0])

        entry_ids = [cur]
        entry_dists = [cur_dist]
        for lv in range(min(level, self._max_level), -1, -1):
            ids, dists = self._search_layer(query, lv, entry_ids, entry_dists,
                                            self.ef_construction)
            cap = self.cap0 if lv == 0 else self.M
            chosen = self._select_neighbors(ids, dists, self.M)
            layer = self._layers[lv]
            layer["adj"][slot, :len(chosen)] = chosen
            layer["deg"][slot] = len(chosen)
            for nb in chosen:
                self._link_back(lv, int(nb), slot, cap)
            # The whole beam seeds the next layer down, not just the winner.
            entry_ids, entry_dists = ids, dists

        if level > self._max_level:
            self._entry = slot
            self._max_level = level

    def _select_neighbors(self, cand_ids, cand_dists, cap: int) -> np.ndarray:
        """Diversity-pruning neighbor selection.

        Walk candidates in ascending distance; keep one only when it is
        closer to the base point than to every neighbor already kept.
        This spreads links across directions, which plain closest-first
        selection does not, and is what keeps the graph navigable (and
        recall high) in high dimensions.  Skipped candidates backfill any
        remaining capacity.
        """
        kept: list[int] = []
        skipped: list[int] = []
        for cid, cdist in zip(cand_ids, cand_dists):
            if len(kept) >= cap:
                break
            cid = int(cid)
            if kept:
                to_kept = 1.0 - self._vectors[kept] @ self._vectors[cid]
                if np.min(to_kept) < cdist:
                    skipped.append(cid)
                    continue
            kept.append(cid)
        for cid in skipped:
            if len(kept) >= cap:
                break
            kept.append(cid)
        return np.array(kept, dtype=np.int32)

    def _link_back(self, level: int, node: int, new_slot: int, cap: int) -> None:
        layer = self._layers[level]
        deg = int(layer["deg"][node])
        if deg < cap:
            layer["adj"][node, deg] = new_slot
            layer["deg"][node] = deg + 1
            return
        # Overflow: re-select the node's neighbor set with the pruning rule.
        cand = np.concatenate([layer["adj"][node, :deg],
                               np.array([new_slot], dtype=np.int32)])
        cand64 = cand.astype(np.int64)
        dists = 1.0 - self._kern.dots(self._vectors, cand64, self._vectors[node])
        order = np.lexsort((cand64, dists))
        kept = self._select_neighbors(cand64[order], dists[order], cap)
        layer["adj"][node, :len(kept)] = kept
        layer["deg"][node] = len(kept)

    # -- queries ------------------------------------------------------------

    def _descend(self, query: np.ndarray) -> tuple[int, float]:
        cur = self._entry
        cur_dist = self._dist(cur, query)
        for lv in range(self._max_level, 0, -1):
            ids, dists = self._search_layer(query, lv, [cur], [cur_dist], 1)
            cur, cur_dist = int(ids[0]), float(dists[0])
        return cur, cur_dist

    def search(self, query, k: int) -> list[tuple[object, float]]:
        """Approximate top-k by cosine distance, ascending."""
        if not self._slot_of:
            raise EmptyIndexError("search on an empty index")
        q = _normalize(np.asarray(query, dtype=np.float64))
        if q.shape != (self.dim,):
            raise DimensionError("query", self.dim, int(q.size))
        cur, cur_dist = self._descend(q)
        ef = max(self.ef_search, k)
        ids, dists = self._search_layer(q, 0, [cur], [cur_dist], ef)
        out = []
        for slot, dist in zip(ids, dists):
            if self._tombstone[slot]:
                continue
            out.append((self._slot_ids[slot], float(dist)))
            if len(out) == k:
                break
        return out

    def linear_scan(self, query, k: int) -> list[tuple[object, float]]:
        """Exact top-k by the same distance; the oracle for `search`."""
        if not self._slot_of:
            return []
        q = _normalize(np.asarray(query, dtype=np.float64))
        slots = np.fromiter(self._slot_of.values(), dtype=np.int64)
        dists = 1.0 - self._vectors[slots] @ q
        order = np.lexsort((slots, dists))[:k]
        return [(self._slot_ids[slots[i]], float(dists[i])) for i in order]

    # -- introspection ------------------------------------------------------

    def levels(self) -> np.ndarray:
        return self._levels[:self._n].copy()

    def layer0_connected(self) -> bool:
        """True when every slot is reachable from the entry point at layer 0."""
        if self._n == 0:
            return True
        layer = self._layers[0]
        seen = np.zeros(self._n, dtype=bool)
        stack = [self._entry]
        seen[self._entry] = True
        while stack:
            node = stack.pop()
            for nb in layer["adj"][node, :layer["deg"][node]]:
                if not seen[nb]:
                    seen[nb] = True
                    stack.append(int(nb))
        return bool(seen.all())

    def neighbor_counts(self) -> dict[int, np.ndarray]:
        return {lv: layer["deg"][:self._n].copy()
                for lv, layer in enumerate(self._layers)}

    def graph_state(self):
        """Adjacency snapshot for determinism checks."""
        return [(layer["adj"][:self._n].copy(), layer["deg"][:self._n].copy())
                for layer in self._layers]
