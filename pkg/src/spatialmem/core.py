"""Shared vector math and world-coordinate conventions."""

import numpy as np

from .config import EngineConfig
from .errors import DimensionError, OutOfWorldError

_AXES = ("x", "y", "z")


def as_embedding(v, d: int, field: str = "embedding") -> np.ndarray:
    """Validate and convert to a float64 vector of length d."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != d:
        raise DimensionError(field, d, int(arr.size))
    if not np.all(np.isfinite(arr)):
        raise DimensionError(field, d, int(arr.size))
    return arr


def as_position(p) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (3,):
        raise DimensionError("position", 3, int(arr.size))
    if not np.all(np.isfinite(arr)):
        raise DimensionError("position", 3, int(arr.size))
    return arr


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between a and b; 0 when either has zero norm.

    The zero-norm convention keeps retrieval total on degenerate embeddings:
    no direction means no evidence of similarity.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError("cosine operand", int(a.size), int(b.size))
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def normalize_position(p_raw, cfg: EngineConfig) -> np.ndarray:
    """Shift by the configured world origin and bounds-check against [0, L)^3."""
    p = as_position(p_raw)
    out = p - np.asarray(cfg.origin, dtype=np.float64)
    for i, axis in enumerate(_AXES):
        if not (0.0 <= out[i] < cfg.L):
            raise OutOfWorldError(axis, float(out[i]), cfg.L)
    return out
