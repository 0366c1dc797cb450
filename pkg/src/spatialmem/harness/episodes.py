"""Episode generation, navigation policies, and store population."""

from dataclasses import dataclass, field

import numpy as np

from ..store import MemoryStore
from .world import BLOCK, STEP, SyntheticWorld

ARRIVE_RADIUS = 2.5   # waypoint reached when closer than this, meters
BUDGET_FACTOR = 4     # step budget = factor * expert path length


@dataclass
class Episode:
    expert_path: np.ndarray          # (n, 3) waypoints
    instructions: list               # [(landmark id, turn flag)]
    agent_path: np.ndarray           # (m, 3)
    goal: np.ndarray                 # final landmark position

    @property
    def stop_position(self) -> np.ndarray:
        return self.agent_path[-1]

    def stop_distance(self) -> float:
        return float(np.linalg.norm(self.stop_position - self.goal))


def street_route(a, b) -> list[np.ndarray]:
    """Waypoints every STEP from intersection a to intersection b,
    x-leg first then y-leg (both legs run along street segments)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    path = [a.copy()]
    cur = a.copy()
    for axis in (0, 1):
        delta = b[axis] - cur[axis]
        steps = int(round(abs(delta) / STEP))
        direction = np.sign(delta)
        for _ in range(steps):
            cur = cur.copy()
            cur[axis] += direction * STEP
            path.append(cur)
    return path


def plan_episode(world: SyntheticWorld, rng, num_landmarks: int = 3):
    """Pick a start and an instructed landmark sequence; build the expert
    path along streets with turn flags where the route changes axis."""
    count = min(num_landmarks, len(world.landmarks))
    order = rng.choice(len(world.landmarks), size=count, replace=False)
    corners = [c for c in world.intersections()]
    start_xy = corners[int(rng.integers(len(corners)))]
    start = np.array([start_xy[0], start_xy[1], 0.0])

    waypoints = [start]
    instructions = []
    prev = start
    for lid in order:
        lm = world.landmarks[int(lid)]
        turn = bool(abs(lm.position[0] - prev[0]) > 1e-9
                    and abs(lm.position[1] - prev[1]) > 1e-9)
        instructions.append((int(lid), turn))
        prev = lm.position
        waypoints.append(lm.position)

    expert = [start]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        expert.extend(street_route(a, b)[1:])
    return np.array(expert), instructions


def populate_store(world: SyntheticWorld, store: MemoryStore,
                   expert_path, instructions, rng) -> None:
    """One expert traversal writing observations into the store.

    Landmark observations (with object ids) are written at the landmark
    intersections; ambient street observations elsewhere.  Turn steps
    carry an instruction cost of 1.
    """
    landmark_at = {tuple(world.landmarks[lid].position[:2]): lid
                   for lid, _ in instructions}
    # Also register every other landmark so the store knows the whole map.
    for lm in world.landmarks:
        landmark_at.setdefault(tuple(lm.position[:2]), lm.id)

    prev = None
    for p in expert_path:
        key = tuple(p[:2])
        turning = prev is not None and not np.allclose(p[:2] - prev[:2],
                                                       expert_path[1][:2] - expert_path[0][:2])
        c_instr = 1.0 if turning else 0.0
        if key in landmark_at:
            lid = landmark_at[key]
            store.write(world.observe(lid, rng), p, object_id=f"lm{lid}",
                        c_instr=c_instr)
        else:
            store.write(world.ambient(p, rng), p, c_instr=c_instr)
        prev = p
    # Make sure every landmark is in long-term memory even if off-route.
    for lm in world.landmarks:
        if tuple(lm.position[:2]) not in {tuple(p[:2]) for p in expert_path}:
            store.write(world.observe(lm.id, rng), lm.position,
                        object_id=f"lm{lm.id}")


def _moves(world: SyntheticWorld, pos: np.ndarray):
    """Legal street moves of one STEP from pos, deterministic order."""
    out = []
    x, y = pos[0], pos[1]
    on_x_street = abs(y % BLOCK) < 1e-9   # can move along x
    on_y_street = abs(x % BLOCK) < 1e-9   # can move along y
    for dx, dy in ((STEP, 0), (-STEP, 0), (0, STEP), (0, -STEP)):
        if dx != 0 and not on_x_street:
            continue
        if dy != 0 and not on_y_street:
            continue
        nx, ny = x + dx, y + dy
        if 0.0 <= nx <= world.extent and 0.0 <= ny <= world.extent:
            out.append(np.array([nx, ny, 0.0]))
    return out


def run_episode(world: SyntheticWorld, store: MemoryStore | None,
                policy: str, rng=None, num_landmarks: int = 3,
                plan=None) -> Episode:
    """Run one episode under the given policy.

    ``expert`` replays the expert path; ``random`` walks randomly;
    ``memory-greedy`` queries the store for each instructed landmark and
    walks toward the best retrieved position.
    """
    rng = rng if rng is not None else np.random.default_rng(world.seed + 1)
    expert_path, instructions = plan if plan is not None else \
        plan_episode(world, rng, num_landmarks)
    goal = world.landmarks[instructions[-1][0]].position

    if policy == "expert":
        return Episode(expert_path, instructions, expert_path.copy(), goal)

    budget = BUDGET_FACTOR * len(expert_path)
    pos = expert_path[0].copy()
    path = [pos.copy()]

    if policy == "random":
        for _ in range(budget):
            options = _moves(world, pos)
            pos = options[int(rng.integers(len(options)))]
            path.append(pos.copy())
        return Episode(expert_path, instructions, np.array(path), goal)

    if policy != "memory-greedy":
        raise ValueError(f"unknown policy {policy!r}")
    if store is None:
        raise ValueError("memory-greedy policy needs a store")

    target_idx = 0
    for _ in range(budget):
        lid, _turn = instructions[target_idx]
        query = world.observe(lid, rng)
        result = store.retrieve(query, pos)
        if result.items:
            goal_est = np.asarray(result.items[0].position, dtype=np.float64)
        else:
            goal_est = None

        if goal_est is not None and np.linalg.norm(pos - goal_est) <= ARRIVE_RADIUS:
            if target_idx == len(instructions) - 1:
                break
            target_idx += 1
            continue

        options = _moves(world, pos)
        if goal_est is None:
            pos = options[int(rng.integers(len(options)))]
        else:
            dists = [float(np.linalg.norm(opt - goal_est)) for opt in options]
            pos = options[int(np.argmin(dists))]
        path.append(pos.copy())
    return Episode(expert_path, instructions, np.array(path), goal)
