"""Synthetic urban grid world and observation generator.

Streets form an axis-aligned lattice of blocks; landmarks sit at street
intersections and emit embeddings drawn from per-landmark Gaussian
clusters.  All generation is deterministic in the seed, and cluster
centers keep a margin of more than twice the jitter so distinct landmarks
stay separable.
"""

from dataclasses import dataclass, field

import numpy as np

BLOCK = 40.0   # street spacing, meters
STEP = 5.0     # walk step along a street, meters


@dataclass
class Landmark:
    id: int
    position: np.ndarray     # intersection, z = 0
    center: np.ndarray       # cluster center in embedding space


@dataclass
class SyntheticWorld:
    seed: int
    blocks: int
    d: int
    jitter: float
    stamp_scale: float
    landmarks: list = field(default_factory=list)
    rng: np.random.Generator = None

    @property
    def extent(self) -> float:
        return self.blocks * BLOCK

    def intersections(self):
        n = self.blocks + 1
        return [(i * BLOCK, j * BLOCK) for i in range(n) for j in range(n)]

    def on_street(self, x: float, y: float) -> bool:
        return (abs(x % BLOCK) < 1e-9 or abs(y % BLOCK) < 1e-9) and \
            0.0 <= x <= self.extent and 0.0 <= y <= self.extent

    def observe(self, landmark_id: int, rng=None) -> np.ndarray:
        """Noisy, position-stamped observation of a landmark."""
        lm = self.landmarks[landmark_id]
        r = rng if rng is not None else self.rng
        v = lm.center + self.jitter * r.normal(size=self.d)
        return self._stamp(v, lm.position)

    def ambient(self, position, rng=None) -> np.ndarray:
        """Non-landmark street observation (one shared cluster)."""
        r = rng if rng is not None else self.rng
        v = self._street_center + self.jitter * r.normal(size=self.d)
        return self._stamp(v, position)

    def _stamp(self, v: np.ndarray, position) -> np.ndarray:
        v = v.copy()
        v[:3] = np.asarray(position, dtype=np.float64) * self.stamp_scale
        return v


def generate_world(seed: int, blocks: int, landmarks_per_block: int,
                   d: int = 256, jitter: float = 0.1,
                   stamp_scale: float = 0.01) -> SyntheticWorld:
    """Deterministic world with separable landmark clusters."""
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    rng = np.random.default_rng(seed)
    world = SyntheticWorld(seed=seed, blocks=blocks, d=d, jitter=jitter,
                           stamp_scale=stamp_scale, rng=rng)
    corners = world.intersections()
    count = min(max(1, landmarks_per_block * blocks), len(corners))
    picks = rng.choice(len(corners), size=count, replace=False)

    margin = 2.0 * jitter * np.sqrt(2.0 * d)  # separation floor for centers
    centers: list[np.ndarray] = []
    for _ in picks:
        for _attempt in range(100):
            c = rng.normal(size=d)
            if all(np.linalg.norm(c - other) > margin for other in centers):
                centers.append(c)
                break
        else:
            raise RuntimeError("could not separate landmark clusters")

    world._street_center = rng.normal(size=d)
    for lid, (corner_idx, center) in enumerate(zip(picks, centers)):
        x, y = corners[corner_idx]
        world.landmarks.append(Landmark(
            id=lid, position=np.array([x, y, 0.0]), center=center))
    return world
