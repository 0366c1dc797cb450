"""Component-ablation protocol over synthetic navigation episodes.

Each variant disables one memory component (or coarsens the spatial
index) while everything else — worlds, plans, observation noise — is
held fixed through shared seeds, so metric differences are attributable
to the disabled component alone.
"""

from dataclasses import dataclass

import numpy as np

from ..config import EngineConfig
from ..store import FeatureFlags, MemoryStore
from .episodes import plan_episode, populate_store, run_episode
from .metrics import ndtw, spd, task_completion
from .world import generate_world

COARSE_LAMBDA = 2  # octree depth used by the "coarse spatial index" variant

VARIANTS = ("full", "no-octree", "no-graph", "no-ltm", "no-stm")


@dataclass
class AblationResult:
    variant: str
    tc: float
    spd: float
    ndtw: float


def _variant_setup(variant: str, cfg: EngineConfig):
    if variant == "full":
        return cfg, FeatureFlags()
    if variant == "no-octree":
        return cfg.replace(Lambda=COARSE_LAMBDA), FeatureFlags()
    if variant == "no-graph":
        return cfg, FeatureFlags(graph=False)
    if variant == "no-ltm":
        return cfg, FeatureFlags(ltm=False)
    if variant == "no-stm":
        return cfg, FeatureFlags(stm=False)
    raise ValueError(f"unknown variant {variant!r}")


def run_variant(variant: str, cfg: EngineConfig, seed: int, episodes: int,
                blocks: int = 4, landmarks_per_block: int = 2,
                num_landmarks: int = 3, policy: str = "memory-greedy"):
    """Metrics for one variant over a fixed set of episodes."""
    vcfg, flags = _variant_setup(variant, cfg)
    results = []
    for i in range(episodes):
        world = generate_world(seed * 1000 + i, blocks, landmarks_per_block,
                               d=cfg.d, stamp_scale=cfg.pos_stamp_scale)
        plan_rng = np.random.default_rng([seed, i, 0])
        plan = plan_episode(world, plan_rng, num_landmarks)

        store = MemoryStore(vcfg, flags)
        populate_store(world, store, plan[0], plan[1],
                       np.random.default_rng([seed, i, 1]))
        episode = run_episode(world, store, policy,
                              rng=np.random.default_rng([seed, i, 2]),
                              plan=plan)
        results.append(episode)
    return AblationResult(variant=variant, tc=task_completion(results),
                          spd=spd(results), ndtw=ndtw(results))


def run_ablation(cfg: EngineConfig, seed: int = 0, episodes: int = 20,
                 blocks: int = 4, landmarks_per_block: int = 2,
                 num_landmarks: int = 3, variants=VARIANTS):
    """All variants plus a random-walk baseline, on identical episodes."""
    rows = [run_variant(v, cfg, seed, episodes, blocks,
                        landmarks_per_block, num_landmarks)
            for v in variants]
    rows.append(run_variant("full", cfg, seed, episodes, blocks,
                            landmarks_per_block, num_landmarks,
                            policy="random"))
    rows[-1].variant = "random-baseline"
    return rows


def format_rows(rows) -> str:
    lines = [f"{'Variant':<18} {'TC':>7} {'SPD (m)':>9} {'nDTW':>7}"]
    for r in rows:
        lines.append(f"{r.variant:<18} {r.tc:>7.3f} {r.spd:>9.2f} {r.ndtw:>7.3f}")
    return "\n".join(lines)
