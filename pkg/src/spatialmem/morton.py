"""Morton (Z-order) addressing of octree leaf cells.

Bit order: x occupies output bits 3i, y bits 3i+1, z bits 3i+2.  This is
fixed for persistence compatibility; changing it would silently remap every
stored leaf key.
"""

import numpy as np

from . import kernels
from .config import EngineConfig
from .errors import MortonRangeError


def quantize(p, cfg: EngineConfig):
    """Floor-quantize a normalized position to integer cell indices.

    index = floor(coordinate * 2^Lambda / L), each in {0, ..., 2^Lambda - 1}.
    """
    scale = (1 << cfg.Lambda) / cfg.L
    p = np.asarray(p, dtype=np.float64)
    idx = np.floor(p * scale).astype(np.int64)
    # Guard the upper edge: coordinates just below L can round up at float
    # precision; the half-open interval makes 2^Lambda - 1 the last cell.
    idx = np.minimum(idx, (1 << cfg.Lambda) - 1)
    return int(idx[0]), int(idx[1]), int(idx[2])


def morton_encode(x: int, y: int, z: int, Lambda: int) -> int:
    limit = 1 << Lambda
    for name, v in (("x", x), ("y", y), ("z", z)):
        if not (0 <= v < limit):
            raise MortonRangeError(f"{name} index {v} outside [0, 2^{Lambda})")
    return kernels.morton_encode(x, y, z)


def morton_decode(key: int, Lambda: int):
    if not (0 <= key < (1 << (3 * Lambda))):
        raise MortonRangeError(f"key {key} outside [0, 2^{3 * Lambda})")
    return kernels.morton_decode(key)


def key_for_position(p, cfg: EngineConfig) -> int:
    return morton_encode(*quantize(p, cfg), cfg.Lambda)


def cell_bounds(key: int, cfg: EngineConfig):
    """(min corner, side length) of the leaf cube addressed by key."""
    x, y, z = morton_decode(key, cfg.Lambda)
    side = cfg.leaf_size
    corner = np.array([x * side, y * side, z * side], dtype=np.float64)
    return corner, side
