"""Supporting graph algorithms.

Matching is delegated to networkx's blossom implementation; flow with lower
bounds uses the standard excess/deficit transformation on top of a small
Dinic max-flow.  Weights arriving here are logs of integer products; callers
that need exact tie resolution re-verify candidates on integer products.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import networkx as nx


class InfeasibleError(ValueError):
    """Requested matching or flow does not exist."""


@dataclass(frozen=True)
class WeightedGraph:
    num_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        for u, v, w in self.edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError("edge endpoint out of range")
            if w != w or w in (float("inf"), float("-inf")):
                raise ValueError("weights must be finite")

    @classmethod
    def of(cls, num_vertices, edges) -> "WeightedGraph":
        return cls(num_vertices, tuple((u, v, float(w)) for u, v, w in edges))


def max_weight_bipartite_matching(
    g: WeightedGraph,
    left_size: int,
    right_size: int,
    require_left_saturated: bool = False,
) -> tuple[list[tuple[int, int]], float]:
    """Maximum-weight matching in a bipartite graph.

    Left vertices are 0..left_size-1, right vertices follow.  With
    require_left_saturated, the matching must cover every left vertex
    (InfeasibleError if none does); any matching of size left_size covers
    all left vertices, so maximum-cardinality search suffices.
    """
    if left_size + right_size != g.num_vertices:
        raise ValueError("left_size + right_size must equal vertex count")
    for u, v, _w in g.edges:
        if (u < left_size) == (v < left_size):
            raise ValueError("edge does not cross the bipartition")
    weights: dict[tuple[int, int], float] = {}
    for u, v, w in g.edges:
        key = (min(u, v), max(u, v))
        weights[key] = max(w, weights.get(key, float("-inf")))
    graph = nx.Graph()
    graph.add_nodes_from(range(g.num_vertices))
    for (u, v), w in weights.items():
        graph.add_edge(u, v, weight=w)
    mate = nx.max_weight_matching(graph, maxcardinality=require_left_saturated)
    pairs = sorted((min(u, v), max(u, v)) for u, v in mate)
    if require_left_saturated:
        covered = {u for p in pairs for u in p if u < left_size}
        if len(covered) < left_size:
            raise InfeasibleError("no matching saturates the left side")
    total = sum(weights[p] for p in pairs)
    return pairs, total


def max_weight_perfect_matching_general(
    g: WeightedGraph,
) -> tuple[list[tuple[int, int]], float]:
    """Maximum-weight perfect matching on a general graph, via blossom.

    Raises InfeasibleError when no perfect matching exists.  Weights are
    assumed nonnegative (logs of integer products >= 1).
    """
    if g.num_vertices % 2 != 0:
        raise InfeasibleError("odd vertex count admits no perfect matching")
    graph = nx.Graph()
    graph.add_nodes_from(range(g.num_vertices))
    weights = {}
    for u, v, w in g.edges:
        key = (min(u, v), max(u, v))
        if key not in weights or w > weights[key]:
            weights[key] = w
            graph.add_edge(u, v, weight=w)
    mate = nx.max_weight_matching(graph, maxcardinality=True)
    if 2 * len(mate) != g.num_vertices:
        raise InfeasibleError("no perfect matching exists")
    pairs = sorted((min(u, v), max(u, v)) for u, v in mate)
    total = sum(weights[p] for p in pairs)
    return pairs, total


class FlowNetwork:
    """Directed network with integral lower/upper bounds per arc."""

    def __init__(self, num_nodes: int, source: int, sink: int):
        self.num_nodes = num_nodes
        self.source = source
        self.sink = sink
        self.arcs: list[tuple[int, int, int, int]] = []

    def add_arc(self, u: int, v: int, lower: int, upper: int) -> int:
        if lower < 0 or lower > upper:
            raise ValueError(f"invalid bounds [{lower}, {upper}] on arc ({u}, {v})")
        self.arcs.append((u, v, lower, upper))
        return len(self.arcs) - 1


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        idx = len(self.to)
        self.head[u].append(idx)
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(idx + 1)
        self.to.append(u)
        self.cap.append(0)
        return idx

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for idx in self.head[u]:
                    v = self.to[idx]
                    if self.cap[idx] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.head[u]):
                    idx = self.head[u][it[u]]
                    v = self.to[idx]
                    if self.cap[idx] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, self.cap[idx]))
                        if got > 0:
                            self.cap[idx] -= got
                            self.cap[idx ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 60)
                if pushed == 0:
                    break
                flow += pushed


def feasible_flow_with_lower_bounds(net: FlowNetwork) -> list[int] | None:
    """Integral flow meeting every arc's [lower, upper] bounds, or None.

    Standard reduction: send each arc's lower bound unconditionally, route
    the resulting node imbalances through a super source/sink, and allow
    sink -> source circulation.
    """
    n = net.num_nodes
    super_s, super_t = n, n + 1
    dinic = _Dinic(n + 2)
    arc_idx = []
    for u, v, lower, upper in net.arcs:
        arc_idx.append(dinic.add_edge(u, v, upper - lower))
    excess = [0] * n
    for u, v, lower, _upper in net.arcs:
        excess[u] -= lower
        excess[v] += lower
    need = 0
    for node in range(n):
        if excess[node] > 0:
            dinic.add_edge(super_s, node, excess[node])
            need += excess[node]
        elif excess[node] < 0:
            dinic.add_edge(node, super_t, -excess[node])
    dinic.add_edge(net.sink, net.source, 1 << 60)
    if dinic.max_flow(super_s, super_t) < need:
        return None
    flows = []
    for (u, v, lower, upper), idx in zip(net.arcs, arc_idx):
        used = (upper - lower) - dinic.cap[idx]
        flows.append(lower + used)
    return flows
