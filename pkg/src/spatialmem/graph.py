"""Dynamic directed landmark graph with threshold-based node creation.

A new node is created only when the incoming embedding is farther than the
configured threshold from every existing descriptor; otherwise the nearest
node absorbs the observation into its running-mean descriptor.  Edges carry
the running mean of observed traversal weights.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .core import as_embedding, normalize_position
from .errors import NodeNotFoundError
from .reversible import RevBlockParams, TokenChain

_TIE_EPS = 1e-12


@dataclass
class GraphNode:
    id: int
    position: np.ndarray      # position at creation
    descriptor: np.ndarray    # running mean of matched observations
    token: TokenChain
    visit_count: int


@dataclass
class GraphEdge:
    src: int
    dst: int
    weight: float             # running mean of observed weights
    observation_count: int


class SemanticGraph:
    def __init__(self, cfg: EngineConfig, params: RevBlockParams, rng):
        self.cfg = cfg
        self.params = params
        self.rng = rng
        self.nodes: list[GraphNode] = []
        self.edges: dict[tuple[int, int], GraphEdge] = {}
        self.current: int | None = None
        self._descriptors = np.empty((0, cfg.d))

    def __len__(self) -> int:
        return len(self.nodes)

    def _node(self, node_id: int) -> GraphNode:
        if not (0 <= node_id < len(self.nodes)):
            raise NodeNotFoundError(f"no node with id {node_id}")
        return self.nodes[node_id]

    def observe(self, v, p_raw, c_instr: float = 0.0,
                force_create: bool = False) -> tuple[int, bool]:
        """Match-or-create a node for v at p; returns (node id, created)."""
        v = as_embedding(v, self.cfg.d)
        p = normalize_position(p_raw, self.cfg)
        created = False
        if self.nodes and not force_create:
            dists = np.linalg.norm(self._descriptors - v, axis=1)
            nearest = int(np.argmin(dists))
            if dists[nearest] > self.cfg.node_threshold:
                nearest = None
        else:
            nearest = None

        if nearest is None:
            node = GraphNode(id=len(self.nodes), position=p.copy(),
                             descriptor=v.copy(),
                             token=TokenChain.fresh(self.cfg.d, self.rng),
                             visit_count=1)
            self.nodes.append(node)
            self._descriptors = np.vstack([self._descriptors, v[None, :]])
            created = True
        else:
            node = self.nodes[nearest]
            node.visit_count += 1
            node.descriptor += (v - node.descriptor) / node.visit_count
            self._descriptors[nearest] = node.descriptor

        node.token = node.token.write(self.params, v)

        if self.current is not None and self.current != node.id:
            prev = self.nodes[self.current]
            w = self.cfg.alpha_w * float(np.linalg.norm(prev.position - p)) \
                + self.cfg.beta_w * float(c_instr)
            edge = self.edges.get((prev.id, node.id))
            if edge is None:
                self.edges[(prev.id, node.id)] = GraphEdge(prev.id, node.id, w, 1)
            else:
                edge.observation_count += 1
                edge.weight += (w - edge.weight) / edge.observation_count
        self.current = node.id
        return node.id, created

    def shortest_path(self, src: int, dst: int):
        """Minimal-weight directed path as (node list, cost); None when
        unreachable.  Equal-cost ties resolve toward smaller node ids."""
        self._node(src)
        self._node(dst)
        adjacency: dict[int, list[tuple[int, float]]] = {}
        for (u, w_id), edge in self.edges.items():
            adjacency.setdefault(u, []).append((w_id, edge.weight))
        for lst in adjacency.values():
            lst.sort()

        dist = {src: 0.0}
        parent: dict[int, int] = {}
        settled = set()
        heap = [(0.0, src)]
        while heap:
            d_u, u = heapq.heappop(heap)
            if u in settled:
                continue
            settled.add(u)
            if u == dst:
                break
            for v_id, w in adjacency.get(u, ()):
                nd = d_u + w
                if v_id not in dist or nd < dist[v_id] - _TIE_EPS:
                    dist[v_id] = nd
                    parent[v_id] = u
                    heapq.heappush(heap, (nd, v_id))
                elif abs(nd - dist[v_id]) <= _TIE_EPS and u < parent.get(v_id, u + 1):
                    parent[v_id] = u
        if dst not in settled:
            return None
        path = [dst]
        while path[-1] != src:
            path.append(parent[path[-1]])
        path.reverse()
        return path, dist[dst]

    def node_tokens_along(self, path) -> list[TokenChain]:
        return [self._node(node_id).token for node_id in path]

    def current_position(self) -> np.ndarray | None:
        if self.current is None:
            return None
        return self.nodes[self.current].position
