"""Compare the compiled kernel backend against the pure-numpy fallback.

Times Morton batch encode/decode and proximity-graph build/search with
each backend and prints a side-by-side table.  Run from the repo root:

    python3 benchmarks/bench_kernels.py [--n 100000] [--index-n 2000]

The same comparison can be forced package-wide by setting
``SPATIALMEM_PURE=1`` before import, which makes every component use the
fallback kernels.
"""

import argparse
import time

import numpy as np

from spatialmem.hnsw import HnswIndex
from spatialmem.kernels import get_backend


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3  # ms


def bench_morton(n: int):
    rng = np.random.default_rng(0)
    coords = rng.integers(0, 1 << 21, size=(n, 3)).astype(np.uint64)
    rows = []
    for name in ("pure", "native"):
        impl = get_backend(name)
        enc = timeit(lambda: impl.morton_encode_batch(
            coords[:, 0], coords[:, 1], coords[:, 2]))
        keys = impl.morton_encode_batch(coords[:, 0], coords[:, 1],
                                        coords[:, 2])
        dec = timeit(lambda: impl.morton_decode_batch(keys))
        rows.append((name, enc, dec))
    return rows


def bench_index(n: int, dim: int, queries: int):
    rng = np.random.default_rng(1)
    data = rng.normal(size=(n, dim))
    qs = rng.normal(size=(queries, dim))
    rows = []
    for name in ("pure", "native"):
        impl = get_backend(name)
        t0 = time.perf_counter()
        index = HnswIndex(dim=dim, M=16, ef_construction=100, ef_search=100,
                          seed=0, backend=impl)
        for i in range(n):
            index.insert(i, data[i])
        build_s = time.perf_counter() - t0
        t0 = time.perf_counter()
        for q in qs:
            index.search(q, 3)
        search_ms = (time.perf_counter() - t0) / queries * 1e3
        rows.append((name, build_s, search_ms))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000,
                    help="coordinates for the Morton benchmark")
    ap.add_argument("--index-n", type=int, default=2000,
                    help="vectors for the index benchmark")
    ap.add_argument("--dim", type=int, default=256)
    ap.add_argument("--queries", type=int, default=200)
    args = ap.parse_args()

    print(f"Morton batch ops over {args.n} coordinates (best of 5, ms):")
    morton = bench_morton(args.n)
    for name, enc, dec in morton:
        print(f"  {name:<8} encode {enc:8.2f}   decode {dec:8.2f}")

    print(f"\nIndex build ({args.index_n} x {args.dim}) and search "
          f"({args.queries} queries):")
    index = bench_index(args.index_n, args.dim, args.queries)
    for name, build_s, search_ms in index:
        print(f"  {name:<8} build {build_s:7.2f} s   search {search_ms:7.3f} ms/query")

    if morton[0][1] > 0 and index[0][1] > 0:
        print(f"\nnative speedup: morton encode "
              f"{morton[0][1] / max(morton[1][1], 1e-9):.1f}x, "
              f"index build {index[0][1] / max(index[1][1], 1e-9):.1f}x, "
              f"search {index[0][2] / max(index[1][2], 1e-9):.1f}x")


if __name__ == "__main__":
    main()
