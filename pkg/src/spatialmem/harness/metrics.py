"""Navigation metrics: task completion, stop distance, path alignment."""

import numpy as np

from ..errors import EmptyInputError

GOAL_RADIUS = 3.0  # meters; an episode counts as completed inside this


def dtw_cost(path_a, path_b) -> float:
    """Dynamic-time-warping cost between two point sequences.

    Standard O(nm) dynamic program with Euclidean point costs.
    """
    a = np.atleast_2d(np.asarray(path_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(path_b, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptyInputError("dtw of an empty path")
    n, m = a.shape[0], b.shape[0]
    cost = np.full((n + 1, m + 1), np.inf)
    cost[0, 0] = 0.0
    for i in range(1, n + 1):
        point_costs = np.linalg.norm(b - a[i - 1], axis=1)
        for j in range(1, m + 1):
            cost[i, j] = point_costs[j - 1] + min(cost[i - 1, j],
                                                  cost[i, j - 1],
                                                  cost[i - 1, j - 1])
    return float(cost[n, m])


def path_length(path) -> float:
    p = np.atleast_2d(np.asarray(path, dtype=np.float64))
    if p.shape[0] < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1)))


def _check(episodes):
    episodes = list(episodes)
    if not episodes:
        raise EmptyInputError("no episodes")
    return episodes


def task_completion(episodes) -> float:
    """Fraction of episodes stopping within the goal radius."""
    eps = _check(episodes)
    return float(np.mean([1.0 if ep.stop_distance() <= GOAL_RADIUS else 0.0
                          for ep in eps]))


def spd(episodes) -> float:
    """Mean distance from the stop position to the goal, meters."""
    eps = _check(episodes)
    return float(np.mean([ep.stop_distance() for ep in eps]))


def ndtw(episodes) -> float:
    """Mean exp(-DTW / expert length) path-alignment score in (0, 1]."""
    eps = _check(episodes)
    scores = []
    for ep in eps:
        cost = dtw_cost(ep.agent_path, ep.expert_path)
        length = path_length(ep.expert_path)
        if length == 0.0:
            scores.append(1.0 if cost == 0.0 else 0.0)
        else:
            scores.append(float(np.exp(-cost / length)))
    return float(np.mean(scores))
