"""Engine configuration and validation.

All tunables of the engine live here so that stores are reproducible from
(config, seed, input stream) alone.  Configs load from JSON or from plain
``key=value`` text files; every field has a default.
"""

import json
import math
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path

from .errors import ConfigError


@dataclass(frozen=True)
class EngineConfig:
    # Embedding / world geometry
    d: int = 256                     # embedding dimension
    Lambda: int = 16                 # octree max depth (3*Lambda must fit 64 bits)
    L: float = 1024.0                # world cube side length, meters
    origin: tuple = (0.0, 0.0, 0.0)  # world origin offset, subtracted on entry

    # Semantic graph
    delta: float = -1.0              # node-creation threshold; <0 means 0.5*sqrt(d)
    alpha_w: float = 1.0             # edge weight: distance coefficient
    beta_w: float = 1.0              # edge weight: instruction-cost coefficient

    # Short-term cache
    lambda_cache: float = 0.5        # frequency/recency mix in the eviction score
    K_cache: int = 128               # cache capacity
    epsilon: float = 3.0             # spatial radius for cache retrieval, meters
    tau_sim: float = 0.5             # similarity threshold gating the cache path
    k_stm: int = 4                   # cache top-k

    # Long-term retrieval
    m_ltm: int = 3                   # top-m long-term matches
    hnsw_M: int = 16
    hnsw_efConstruction: int = 200
    hnsw_efSearch: int = 200
    layer0_cap_factor: int = 2       # layer-0 neighbor cap = factor * M
    exact_search_threshold: int = 1024  # below this many vectors, search exactly
    ltm_unroll_depth: int = 1        # how many writes to decode per retrieved token
    proj_pos_scale: float = 0.25     # weight of the position block in the query projection

    # Reversible block
    rev_layers: int = 4
    rev_hidden: int = -1             # <0 means d
    rev_init_scale: float = 0.05

    # Decoders
    decoder_hidden: int = 64
    decoder_mode: str = "passthrough"  # "passthrough" | "trained" | "strict"
    pos_stamp_scale: float = 0.01      # scale used when positions are stamped into embeddings

    rng_seed: int = 0

    def __post_init__(self):
        if self.d <= 0:
            raise ConfigError("d must be positive")
        if not (0 < self.Lambda <= 21):
            raise ConfigError("Lambda must be in (0, 21] so 3*Lambda fits a 64-bit key")
        if self.L <= 0:
            raise ConfigError("L must be positive")
        if not (0.0 <= self.lambda_cache <= 1.0):
            raise ConfigError("lambda_cache must be in [0, 1]")
        if self.K_cache <= 0:
            raise ConfigError("K_cache must be positive")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if not (0.0 <= self.tau_sim <= 1.0):
            raise ConfigError("tau_sim must be in [0, 1]")
        if self.hnsw_M < 2:
            raise ConfigError("hnsw_M must be >= 2")
        if self.hnsw_efSearch < self.m_ltm:
            raise ConfigError("hnsw_efSearch must be >= m_ltm")
        if self.k_stm <= 0 or self.m_ltm <= 0:
            raise ConfigError("k_stm and m_ltm must be positive")
        if self.decoder_mode not in ("passthrough", "trained", "strict"):
            raise ConfigError(f"unknown decoder_mode {self.decoder_mode!r}")
        if len(self.origin) != 3:
            raise ConfigError("origin must have 3 components")
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))

    @property
    def node_threshold(self) -> float:
        """Effective node-creation threshold (delta)."""
        return self.delta if self.delta >= 0 else 0.5 * math.sqrt(self.d)

    @property
    def rev_hidden_dim(self) -> int:
        return self.rev_hidden if self.rev_hidden > 0 else self.d

    @property
    def leaf_size(self) -> float:
        return self.L / (1 << self.Lambda)

    def replace(self, **kw) -> "EngineConfig":
        data = asdict(self)
        data.update(kw)
        return EngineConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "EngineConfig":
        """Load from JSON (``.json``) or plain key=value text."""
        text = Path(path).read_text()
        if str(path).endswith(".json"):
            return cls.from_dict(json.loads(text))
        data = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            data[key] = _parse_value(key, value)
        return cls.from_dict(data)


_FIELD_TYPES = {f.name: f.type for f in fields(EngineConfig)}


def _parse_value(key: str, value: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    if key == "origin":
        parts = value.replace("(", "").replace(")", "").split(",")
        return tuple(float(p) for p in parts)
    if key == "decoder_mode":
        return value
    kind = _FIELD_TYPES[key]
    if kind is int or kind == "int":
        return int(value)
    return float(value)
