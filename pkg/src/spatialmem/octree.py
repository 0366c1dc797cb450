"""Sparse octree over [0, L)^3 with Morton-keyed leaf storage.

Only visited depth-Lambda leaves are materialized, in a hash map keyed by
the 64-bit Morton code.  Interior levels are implicit (derivable by key
shifting) and never stored.
"""

from dataclasses import dataclass

import numpy as np

from . import morton
from .config import EngineConfig
from .core import as_embedding, normalize_position
from .reversible import RevBlockParams, TokenChain


@dataclass(frozen=True)
class OctreeLeaf:
    """Immutable snapshot of one instantiated leaf cell."""

    key: int
    token: TokenChain
    bounds_min: np.ndarray
    side: float
    write_count: int


class SparseOctree:
    def __init__(self, cfg: EngineConfig, params: RevBlockParams, rng):
        self.cfg = cfg
        self.params = params
        self.rng = rng
        self._leaves: dict[int, OctreeLeaf] = {}  # insertion-ordered

    def __len__(self) -> int:
        return len(self._leaves)

    def write(self, p_raw, v) -> int:
        """Insert-or-update the leaf containing p; returns its Morton key."""
        v = as_embedding(v, self.cfg.d)
        p = normalize_position(p_raw, self.cfg)
        key = morton.key_for_position(p, self.cfg)
        leaf = self._leaves.get(key)
        if leaf is None:
            corner, side = morton.cell_bounds(key, self.cfg)
            token = TokenChain.fresh(self.cfg.d, self.rng)
            leaf = OctreeLeaf(key=key, token=token, bounds_min=corner,
                              side=side, write_count=0)
        token = leaf.token.write(self.params, v)
        self._leaves[key] = OctreeLeaf(key=key, token=token,
                                       bounds_min=leaf.bounds_min,
                                       side=leaf.side,
                                       write_count=leaf.write_count + 1)
        return key

    def lookup(self, p_raw) -> OctreeLeaf | None:
        p = normalize_position(p_raw, self.cfg)
        return self._leaves.get(morton.key_for_position(p, self.cfg))

    def get(self, key: int) -> OctreeLeaf | None:
        return self._leaves.get(key)

    def leaves(self):
        """Leaves in insertion order (deterministic for persistence)."""
        return list(self._leaves.values())

    def restore(self, leaf: OctreeLeaf) -> None:
        """Reinstate a persisted leaf verbatim (load path only)."""
        self._leaves[leaf.key] = leaf
