"""Command-line front end for the memory engine.

Subcommands::

    ingest       read a trajectory file into a store snapshot
    query        retrieve from a snapshot at a position
    bench        retrieval-latency tables
    ablate       component-ablation metrics on synthetic episodes
    verify-index approximate-vs-exact recall check on a snapshot
    train-cycle  fit the reconstruction head on random writes

Exit codes: 0 success, 1 usage error, 2 data error.

Trajectory files are whitespace-separated text, one observation per line:
``step x y z object_id v0 ... v_{d-1}`` with ``-`` for observations that
carry no object id.  Lines starting with ``#`` are ignored.
"""

import argparse
import sys

import numpy as np

from .config import EngineConfig
from .errors import EngineError
from .store import MemoryStore


def _load_config(args) -> EngineConfig:
    if getattr(args, "config", None):
        return EngineConfig.from_file(args.config)
    return EngineConfig()


def read_trajectory(path, d: int):
    """Yield (step, position, object_id, embedding) records."""
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 5 + d:
                raise ValueError(
                    f"{path}:{lineno}: expected {5 + d} fields, got {len(parts)}")
            step = int(parts[0])
            pos = np.array([float(x) for x in parts[1:4]])
            object_id = None if parts[4] == "-" else parts[4]
            v = np.array([float(x) for x in parts[5:]])
            yield step, pos, object_id, v


def cmd_ingest(args) -> int:
    cfg = _load_config(args)
    store = MemoryStore(cfg)
    count = 0
    for _step, pos, object_id, v in read_trajectory(args.trajectory, cfg.d):
        store.write(v, pos, object_id=object_id)
        count += 1
    size = store.save(args.output)
    print(f"ingested {count} observations -> {args.output} ({size} bytes)")
    for key, value in store.stats().items():
        print(f"  {key}: {value}")
    return 0


def cmd_query(args) -> int:
    store = MemoryStore.load(args.snapshot)
    pos = np.array([args.x, args.y, args.z])
    rng = np.random.default_rng(args.seed)
    if args.embedding:
        v = np.loadtxt(args.embedding).reshape(-1)
    else:
        v = rng.normal(size=store.cfg.d)
    result = store.retrieve(v, pos)
    print(f"source: {result.source}")
    for i, item in enumerate(result.items):
        p = item.position
        print(f"  [{i}] similarity={item.similarity:.4f} "
              f"position=({p[0]:.2f}, {p[1]:.2f}, {p[2]:.2f})")
    return 0


def cmd_bench(args) -> int:
    from .harness import bench
    cfg = _load_config(args)
    rows = bench.bench_retrieval(
        cfg, store_sizes=tuple(args.sizes), cache_sizes=tuple(args.cache_sizes),
        trials=args.trials)
    print(bench.format_rows(rows))
    if args.tsv:
        with open(args.tsv, "w") as fh:
            fh.write(bench.rows_tsv(rows) + "\n")
    return 0


def cmd_ablate(args) -> int:
    from .harness import ablation
    cfg = _load_config(args)
    rows = ablation.run_ablation(cfg, seed=args.seed, episodes=args.episodes)
    print(ablation.format_rows(rows))
    return 0


def cmd_verify_index(args) -> int:
    store = MemoryStore.load(args.snapshot)
    n = store.stats()["ltm_elements"]
    if n == 0:
        print("empty store: nothing to verify", file=sys.stderr)
        return 2
    index = store._ensure_index()
    rng = np.random.default_rng(args.seed)
    hits = total = 0
    for _ in range(args.queries):
        q = store.project_query(rng.normal(size=store.cfg.d),
                                rng.uniform(0, store.cfg.L, size=3))
        approx = {e for e, _ in index.search(q, args.k)}
        exact = {e for e, _ in index.linear_scan(q, args.k)}
        hits += len(approx & exact)
        total += len(exact)
    recall = hits / total if total else 1.0
    print(f"elements={n} queries={args.queries} recall@{args.k}={recall:.4f}")
    return 0 if recall >= args.min_recall else 2


def cmd_train_cycle(args) -> int:
    from .reversible import RevBlockParams, ResidualMLP, train_cycle
    cfg = _load_config(args)
    rng = np.random.default_rng(args.seed)
    params = RevBlockParams.init(cfg.d, cfg.rev_hidden_dim, cfg.rev_layers,
                                 cfg.rev_init_scale, rng)
    pi_v = ResidualMLP.init(2 * cfg.d, cfg.d, cfg.decoder_hidden, 0.05, rng)
    theta = rng.normal(size=(args.samples, cfg.d))
    v = rng.normal(size=(args.samples, cfg.d))
    _, history = train_cycle(params, pi_v, theta, v, steps=args.steps,
                             lr=args.lr)
    print(f"loss: {history[0]:.6f} -> {history[-1]:.6f} "
          f"({args.steps} steps)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spatialmem", description="Spatial memory engine CLI")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a snapshot from a trajectory file")
    p.add_argument("trajectory")
    p.add_argument("output")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("query", help="retrieve from a snapshot")
    p.add_argument("snapshot")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.add_argument("z", type=float)
    p.add_argument("--embedding", help="text file with the query embedding")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("bench", help="latency tables")
    p.add_argument("--sizes", type=int, nargs="+", default=[5000, 10000, 20000])
    p.add_argument("--cache-sizes", type=int, nargs="+", default=[64, 128, 256])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--tsv", help="also write rows to this TSV file")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("ablate", help="component-ablation metrics")
    p.add_argument("--episodes", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    p.set_defaults(fn=cmd_ablate)

    p = sub.add_parser("verify-index", help="approximate-vs-exact recall")
    p.add_argument("snapshot")
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-recall", type=float, default=0.9)
    p.set_defaults(fn=cmd_verify_index)

    p = sub.add_parser("train-cycle", help="fit the reconstruction head")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    p.set_defaults(fn=cmd_train_cycle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.fn(args)
    except (EngineError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
