"""Retrieval-latency benchmark producing the latency tables."""

import time
from dataclasses import dataclass

import numpy as np

from ..config import EngineConfig
from ..hnsw import HnswIndex
from ..store import MemoryStore


@dataclass
class BenchRow:
    component: str
    parameter: str
    median_ms: float
    mean_ms: float


def _time_calls(fn, trials: int) -> tuple[float, float]:
    samples = np.empty(trials)
    for i in range(trials):
        t0 = time.perf_counter_ns()
        fn(i)
        samples[i] = (time.perf_counter_ns() - t0) / 1e6
    return float(np.median(samples)), float(np.mean(samples))


def populated_store(cfg: EngineConfig, n_elements: int, seed: int = 7) -> MemoryStore:
    """Store whose token index holds at least n_elements vectors."""
    rng = np.random.default_rng(seed)
    store = MemoryStore(cfg)
    while store.stats()["ltm_elements"] < n_elements:
        p = rng.uniform(0.0, cfg.L, size=3)
        v = rng.normal(size=cfg.d)
        store.write(v, p)
    return store


def bench_stm(cfg: EngineConfig, cache_sizes, trials: int, seed: int = 11):
    rng = np.random.default_rng(seed)
    rows = []
    for K in cache_sizes:
        c = cfg.replace(K_cache=int(K))
        store = MemoryStore(c)
        center = np.array([c.L / 2, c.L / 2, c.L / 2])
        for i in range(int(K)):
            offset = rng.uniform(-c.epsilon, c.epsilon, size=3)
            store.write(rng.normal(size=c.d), center + offset, object_id=f"o{i}")
        queries = rng.normal(size=(trials, c.d))
        med, mean = _time_calls(
            lambda i: store.stm.retrieve(queries[i], center, center), trials)
        rows.append(BenchRow("STM lookup", f"K={K}", med, mean))
    return rows


def bench_ltm(cfg: EngineConfig, store_sizes, trials: int, seed: int = 13):
    rng = np.random.default_rng(seed)
    rows = []
    for n in store_sizes:
        store = populated_store(cfg, int(n), seed=seed)
        store._ensure_index()  # build outside the timed region
        queries = rng.normal(size=(trials, cfg.d))
        points = rng.uniform(0.0, cfg.L, size=(trials, 3))
        med, mean = _time_calls(
            lambda i: store.retrieve(queries[i], points[i]), trials)
        rows.append(BenchRow("STM+LTM retrieve", f"N={n}", med, mean))

        index = store._index
        proj = [store.project_query(queries[i], points[i]) for i in range(trials)]
        med, mean = _time_calls(lambda i: index.search(proj[i], cfg.m_ltm), trials)
        rows.append(BenchRow("LTM HNSW search", f"N={n}", med, mean))

        med, mean = _time_calls(lambda i: index.linear_scan(proj[i], cfg.m_ltm),
                                trials)
        rows.append(BenchRow("Linear scan", f"N={n}", med, mean))
    return rows


def bench_retrieval(cfg: EngineConfig, store_sizes=(5000, 10000, 20000),
                    cache_sizes=(64, 128, 256), trials: int = 1000):
    """Median/mean retrieval latency rows across configurations."""
    return bench_stm(cfg, cache_sizes, trials) + \
        bench_ltm(cfg, store_sizes, trials)


def format_rows(rows) -> str:
    lines = [f"{'Component':<20} {'Parameter':<12} {'Median (ms)':>12} {'Mean (ms)':>12}"]
    for r in rows:
        lines.append(f"{r.component:<20} {r.parameter:<12} "
                     f"{r.median_ms:>12.3f} {r.mean_ms:>12.3f}")
    return "\n".join(lines)


def rows_tsv(rows) -> str:
    out = ["component\tparameter\tmedian_ms\tmean_ms"]
    for r in rows:
        out.append(f"{r.component}\t{r.parameter}\t{r.median_ms:.6f}\t{r.mean_ms:.6f}")
    return "\n".join(out)
