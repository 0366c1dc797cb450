"""Synthetic evaluation harness: worlds, episodes, metrics, benchmarks."""

from .ablation import AblationResult, run_ablation, run_variant
from .bench import BenchRow, bench_retrieval
from .episodes import Episode, plan_episode, populate_store, run_episode, street_route
from .metrics import GOAL_RADIUS, dtw_cost, ndtw, path_length, spd, task_completion
from .world import BLOCK, STEP, Landmark, SyntheticWorld, generate_world

__all__ = [
    "AblationResult", "run_ablation", "run_variant",
    "BenchRow", "bench_retrieval",
    "Episode", "plan_episode", "populate_store", "run_episode", "street_route",
    "GOAL_RADIUS", "dtw_cost", "ndtw", "path_length", "spd", "task_completion",
    "BLOCK", "STEP", "Landmark", "SyntheticWorld", "generate_world",
]
