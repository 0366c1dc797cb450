"""Fixed-capacity short-term cache with a frequency/recency eviction score.

Entries store absolute positions; relative coordinates are computed against
the current reference point at retrieval time, so the cache stays sound
when the current graph node changes.
"""

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .core import as_embedding, as_position, cosine_similarity


@dataclass
class StmEntry:
    object_id: str
    position_abs: np.ndarray
    embedding: np.ndarray
    timestamp: int
    freq: int
    seq: int  # insertion sequence, last-resort tie-break


class StmCache:
    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self._entries: dict[str, StmEntry] = {}
        self._seq = 0

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[StmEntry]:
        return list(self._entries.values())

    def score(self, entry: StmEntry, now: int) -> float:
        lam = self.cfg.lambda_cache
        return lam * entry.freq - (1.0 - lam) * (now - entry.timestamp)

    def insert(self, object_id: str, p_abs, v, now: int) -> StmEntry | None:
        """Insert or refresh; returns the evicted entry, if any."""
        v = as_embedding(v, self.cfg.d)
        p_abs = as_position(p_abs)
        existing = self._entries.get(object_id)
        if existing is not None:
            existing.embedding = v
            existing.position_abs = p_abs
            existing.timestamp = now
            existing.freq += 1
            return None
        evicted = None
        if len(self._entries) >= self.cfg.K_cache:
            evicted = min(self._entries.values(),
                          key=lambda e: (self.score(e, now), e.timestamp, e.seq))
            del self._entries[evicted.object_id]
        self._seq += 1
        self._entries[object_id] = StmEntry(object_id=object_id,
                                            position_abs=p_abs, embedding=v,
                                            timestamp=now, freq=1,
                                            seq=self._seq)
        return evicted

    def retrieve(self, v_now, p_now, reference_pos,
                 count_hits: bool = True) -> list[tuple[StmEntry, float]]:
        """Radius-filtered cosine retrieval, best first.

        Candidates are entries whose position relative to ``reference_pos``
        lies within epsilon of the query's relative position; the top
        ``k_stm`` by cosine similarity are returned.
        """
        if not self._entries:
            return []
        v_now = as_embedding(v_now, self.cfg.d)
        p_now = as_position(p_now)
        reference_pos = as_position(reference_pos)
        q_rel = p_now - reference_pos
        ranked = []
        for entry in self._entries.values():
            p_rel = entry.position_abs - reference_pos
            if np.linalg.norm(p_rel - q_rel) <= self.cfg.epsilon:
                ranked.append((entry, cosine_similarity(v_now, entry.embedding)))
        ranked.sort(key=lambda pair: (-pair[1], pair[0].seq))
        top = ranked[:self.cfg.k_stm]
        if count_hits:
            for entry, _ in top:
                entry.freq += 1
        return top
