"""Pure-Python/numpy kernel fallback.

Mirrors the compiled extension in ``_native``: Morton bit interleaving and
the small-world graph beam search.  Selected at import time by
:mod:`spatialmem.kernels` when the extension is unavailable.
"""

import heapq

import numpy as np

BACKEND = "pure"

# 21-bit magic constants: spread every bit of a 21-bit integer two apart.
_M1 = 0x1F00000000FFFF
_M2 = 0x1F0000FF0000FF
_M3 = 0x100F00F00F00F00F
_M4 = 0x10C30C30C30C30C3
_M5 = 0x1249249249249249
_MASK64 = (1 << 64) - 1


def _spread(v: int) -> int:
    v &= 0x1FFFFF
    v = (v | (v << 32)) & _M1
    v = (v | (v << 16)) & _M2
    v = (v | (v << 8)) & _M3
    v = (v | (v << 4)) & _M4
    v = (v | (v << 2)) & _M5
    return v


def _compact(v: int) -> int:
    v &= _M5
    v = (v ^ (v >> 2)) & _M4
    v = (v ^ (v >> 4)) & _M3
    v = (v ^ (v >> 8)) & _M2
    v = (v ^ (v >> 16)) & _M1
    v = (v ^ (v >> 32)) & 0x1FFFFF
    return v


def morton_encode(x: int, y: int, z: int) -> int:
    """Interleave bits: x lands on bits 3i, y on 3i+1, z on 3i+2."""
    return _spread(x) | (_spread(y) << 1) | (_spread(z) << 2)


def morton_decode(key: int):
    return _compact(key), _compact(key >> 1), _compact(key >> 2)


def morton_encode_batch(xs, ys, zs) -> np.ndarray:
    def spread(a):
        a = a.astype(np.uint64)
        a = (a | (a << np.uint64(32))) & np.uint64(_M1)
        a = (a | (a << np.uint64(16))) & np.uint64(_M2)
        a = (a | (a << np.uint64(8))) & np.uint64(_M3)
        a = (a | (a << np.uint64(4))) & np.uint64(_M4)
        a = (a | (a << np.uint64(2))) & np.uint64(_M5)
        return a

    xs = np.asarray(xs, dtype=np.uint64)
    ys = np.asarray(ys, dtype=np.uint64)
    zs = np.asarray(zs, dtype=np.uint64)
    return spread(xs) | (spread(ys) << np.uint64(1)) | (spread(zs) << np.uint64(2))


def morton_decode_batch(keys) -> tuple:
    def compact(a):
        a = a & np.uint64(_M5)
        a = (a ^ (a >> np.uint64(2))) & np.uint64(_M4)
        a = (a ^ (a >> np.uint64(4))) & np.uint64(_M3)
        a = (a ^ (a >> np.uint64(8))) & np.uint64(_M2)
        a = (a ^ (a >> np.uint64(16))) & np.uint64(_M1)
        a = (a ^ (a >> np.uint64(32))) & np.uint64(0x1FFFFF)
        return a

    keys = np.asarray(keys, dtype=np.uint64)
    return compact(keys), compact(keys >> np.uint64(1)), compact(keys >> np.uint64(2))


def dots(matrix: np.ndarray, ids: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Dot product of query against the selected rows of matrix."""
    return matrix[ids] @ query


def search_layer(vectors, adj, deg, query, entry_ids, entry_dists, ef, visited, epoch):
    """Best-first beam search on one proximity-graph layer.

    Cosine distance (1 - dot) over pre-normalized vectors.  ``visited`` is an
    int64 scratch array marked with ``epoch`` to dedupe without clearing.
    Returns (ids, dists) of up to ``ef`` closest reached nodes, unsorted.
    """
    candidates = []  # min-heap (dist, id)
    results = []     # max-heap (-dist, id)
    for eid, edist in zip(entry_ids, entry_dists):
        eid = int(eid)
        if visited[eid] == epoch:
            continue
        visited[eid] = epoch
        heapq.heappush(candidates, (float(edist), eid))
        heapq.heappush(results, (-float(edist), eid))
        if len(results) > ef:
            heapq.heappop(results)
    while candidates:
        dist_c, c = heapq.heappop(candidates)
        if len(results) >= ef and dist_c > -results[0][0]:
            break
        n = deg[c]
        if n == 0:
            continue
        neigh = adj[c, :n]
        fresh = neigh[visited[neigh] != epoch]
        if fresh.size == 0:
            continue
        visited[fresh] = epoch
        dvals = 1.0 - vectors[fresh] @ query
        for u, du in zip(fresh, dvals):
            du = float(du)
            if len(results) < ef or du < -results[0][0]:
                heapq.heappush(candidates, (du, int(u)))
                heapq.heappush(results, (-du, int(u)))
                if len(results) > ef:
                    heapq.heappop(results)
    out_ids = np.array([i for _, i in results], dtype=np.int64)
    out_dists = np.array([-d for d, _ in results], dtype=np.float64)
    return out_ids, out_dists
