import numpy as np
import pytest

from spatialmem import EmptyInputError
from spatialmem.harness.episodes import Episode
from spatialmem.harness.metrics import (GOAL_RADIUS, dtw_cost, ndtw,
                                        path_length, spd, task_completion)


def dtw_recursive(a, b, i=None, j=None):
    """Direct recursive DTW definition; oracle for paths of length <= 6."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if i is None:
        i, j = a.shape[0] - 1, b.shape[0] - 1
    cost = float(np.linalg.norm(a[i] - b[j]))
    if i == 0 and j == 0:
        return cost
    best = np.inf
    if i > 0:
        best = min(best, dtw_recursive(a, b, i - 1, j))
    if j > 0:
        best = min(best, dtw_recursive(a, b, i, j - 1))
    if i > 0 and j > 0:
        best = min(best, dtw_recursive(a, b, i - 1, j - 1))
    return cost + best


def episode(agent, expert, goal=None):
    agent = np.atleast_2d(np.asarray(agent, dtype=float))
    expert = np.atleast_2d(np.asarray(expert, dtype=float))
    goal = expert[-1] if goal is None else np.asarray(goal, dtype=float)
    return Episode(expert_path=expert, instructions=[], agent_path=agent,
                   goal=goal)


def test_dtw_identical_paths_zero():
    p = [[0, 0, 0], [1, 0, 0], [2, 0, 0]]
    assert dtw_cost(p, p) == 0.0


def test_dtw_single_points():
    assert dtw_cost([[0, 0, 0]], [[3, 4, 0]]) == pytest.approx(5.0)


def test_dtw_empty_raises():
    with pytest.raises(EmptyInputError):
        dtw_cost(np.empty((0, 3)), [[0, 0, 0]])


def test_dtw_matches_recursive_oracle(rng):
    for _ in range(50):
        n, m = rng.integers(1, 7), rng.integers(1, 7)
        a = rng.uniform(-5, 5, size=(n, 3))
        b = rng.uniform(-5, 5, size=(m, 3))
        assert dtw_cost(a, b) == pytest.approx(dtw_recursive(a, b))


def test_path_length():
    assert path_length([[0, 0, 0]]) == 0.0
    assert path_length([[0, 0, 0], [3, 4, 0], [3, 4, 12]]) == pytest.approx(17.0)


def test_identical_paths_perfect_scores():
    p = [[0, 0, 0], [5, 0, 0], [10, 0, 0]]
    eps = [episode(p, p)]
    assert task_completion(eps) == 1.0
    assert spd(eps) == 0.0
    assert ndtw(eps) == 1.0


def test_task_completion_radius_boundary():
    expert = [[0, 0, 0], [10, 0, 0]]
    inside = episode([[0, 0, 0], [10 - GOAL_RADIUS, 0, 0]], expert)
    outside = episode([[0, 0, 0], [10 - GOAL_RADIUS - 0.01, 0, 0]], expert)
    assert task_completion([inside]) == 1.0
    assert task_completion([outside]) == 0.0
    assert task_completion([inside, outside]) == 0.5


def test_spd_is_mean_stop_distance():
    expert = [[0, 0, 0], [10, 0, 0]]
    eps = [episode([[0, 0, 0], [10, 0, 0]], expert),
           episode([[0, 0, 0], [4, 0, 0]], expert)]
    assert spd(eps) == pytest.approx(3.0)


def test_ndtw_decays_with_divergence():
    expert = [[0, 0, 0], [5, 0, 0], [10, 0, 0]]
    close = episode([[0, 0, 0], [5, 1, 0], [10, 0, 0]], expert)
    far = episode([[0, 10, 0], [5, 10, 0], [10, 10, 0]], expert)
    assert ndtw([close]) > ndtw([far])
    assert 0.0 < ndtw([far]) < 1.0


def test_empty_episode_list_raises():
    with pytest.raises(EmptyInputError):
        task_completion([])
    with pytest.raises(EmptyInputError):
        spd([])
    with pytest.raises(EmptyInputError):
        ndtw([])
