"""Exact polynomial-time solvers for restricted instance families.

- solve_symmetric_binary: exchange-graph local search for symmetric 0/1
  valuations.
- solve_degree_two: path/cycle casework when every agent has degree <= 2.
- solve_degree3_capacity2: firms of degree <= 3 that must each receive
  exactly two workers; reduces to a max-weight perfect matching on workers.
- solve_single_positive_firm: workers valuing exactly one firm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    DomainError,
    Instance,
    Matching,
    NashValue,
    UNMATCHED,
    degree_profile,
    firm_bundle_value,
    nash_value,
)
from .exact import _zero_result
from .feasibility import exists_nonzero_nash
from .graphalgs import InfeasibleError, WeightedGraph, max_weight_perfect_matching_general


@dataclass(frozen=True)
class ExchangeGraph:
    """Directed firm multigraph for the symmetric-binary local search.

    arcs[f][f'] lists witness workers currently at f that firm f' values;
    moving any of them from f to f' keeps every interior utility unchanged.
    """

    num_firms: int
    arcs: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def build(cls, inst: Instance, mu: Matching) -> "ExchangeGraph":
        n = inst.n
        arcs = [[[] for _ in range(n)] for _ in range(n)]
        for w, f in enumerate(mu.assignment):
            if f is UNMATCHED:
                continue
            for g in range(n):
                if g != f and inst.firm_vals[g][w] > 0:
                    arcs[f][g].append(w)
        return cls(n, tuple(tuple(tuple(row) for row in out) for out in arcs))


def _check_symmetric_binary(inst: Instance) -> None:
    for w in range(inst.m):
        for f in range(inst.n):
            a = inst.worker_vals[w][f]
            b = inst.firm_vals[f][w]
            if a != b or a not in (0, 1):
                raise DomainError("valuations must be symmetric and binary")


def symmetric_binary_iteration_cap(m: int, n: int) -> int:
    return math.ceil(2 * m * (n + 1) * math.log(n * m)) if n * m > 1 else 0


def solve_symmetric_binary(
    inst: Instance, stats: Optional[dict] = None
) -> tuple[Matching, NashValue]:
    """Nash-optimal matching under symmetric binary valuations.

    Starts from any all-positive matching and repeatedly applies the best
    good path in the exchange graph: a firm path whose rematching shifts one
    worker along every arc, lowering the start firm's utility by 1 and
    raising the end firm's by 1.  Such a path improves the Nash product iff
    u_start >= u_end + 2 and the end firm has slack; the gain depends only
    on the endpoints, so the best path is found by scanning endpoint pairs
    in decreasing gain order and testing reachability.
    """
    _check_symmetric_binary(inst)
    m, n = inst.m, inst.n
    cap = symmetric_binary_iteration_cap(m, n)
    if stats is not None:
        stats["cap"] = cap
        stats["iterations"] = 0
    ok, mu = exists_nonzero_nash(inst)
    if not ok:
        return _zero_result(inst)
    assignment = list(mu.assignment)
    iterations = 0
    while True:
        loads = [0] * n
        for f in assignment:
            loads[f] += 1
        graph = ExchangeGraph.build(inst, Matching.of(assignment))
        pairs = []
        for u in range(n):
            for v in range(n):
                if u == v or loads[u] < loads[v] + 2 or loads[v] >= inst.capacities[v]:
                    continue
                gain = Fraction((loads[u] - 1) * (loads[v] + 1), loads[u] * loads[v])
                pairs.append((gain, u, v))
        pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
        applied = False
        for _gain, u, v in pairs:
            path = _find_path(graph, u, v)
            if path is None:
                continue
            before = math.prod(loads)
            # apply tail-first so intermediate loads never exceed capacity
            for f, g, w in reversed(path):
                assert assignment[w] == f and inst.firm_vals[g][w] > 0
                assignment[w] = g
            loads[u] -= 1
            loads[v] += 1
            after = math.prod(loads)
            assert after > before, "good path failed to increase the product"
            applied = True
            break
        if not applied:
            break
        iterations += 1
        if stats is not None:
            stats["iterations"] = iterations
        if iterations > cap + 10:
            raise RuntimeError("exchange-graph iteration cap exceeded")
    mu = Matching.of(assignment)
    return mu, nash_value(inst, mu)


def _find_path(graph: ExchangeGraph, u: int, v: int):
    """BFS from u to v; returns [(f, g, witness_worker), ...] or None."""
    parent: dict[int, tuple[int, int]] = {u: (-1, -1)}
    queue = [u]
    while queue:
        nxt = []
        for f in queue:
            for g in range(graph.num_firms):
                if g in parent or not graph.arcs[f][g]:
                    continue
                parent[g] = (f, graph.arcs[f][g][0])
                if g == v:
                    path = []
                    node = v
                    while node != u:
                        pf, w = parent[node]
                        path.append((pf, node, w))
                        node = pf
                    path.reverse()
                    return path
                nxt.append(g)
        queue = nxt
    return None


def _positive_edges(inst: Instance) -> list[list[int]]:
    """Adjacency (worker -> firms) of the graph where an edge survives iff
    either side values the other positively."""
    adj = [[] for _ in range(inst.m)]
    for w in range(inst.m):
        for f in range(inst.n):
            if inst.worker_vals[w][f] > 0 or inst.firm_vals[f][w] > 0:
                adj[w].append(f)
    return adj


def solve_degree_two(inst: Instance) -> tuple[Matching, NashValue]:
    """Nash-optimal matching when every agent has degree at most 2.

    The surviving-edge graph decomposes into paths and cycles.  Each
    component admits only a handful of candidate matchings: a path with
    equal worker and firm counts has a unique perfect matching; a path with
    one extra worker needs exactly one doubled firm, guessed among its
    firms; a cycle has two alternating perfect matchings; components that
    cannot give every member positive utility force a zero optimum.
    Candidates are scored exactly and per-component optima multiply.
    """
    prof = degree_profile(inst)
    if prof.max_degree > 2:
        raise DomainError("an agent has degree above 2")
    m, n = inst.m, inst.n
    # vertices: workers 0..m-1, firms m..m+n-1
    adj = [[] for _ in range(m + n)]
    for w in range(m):
        for f in range(n):
            if inst.worker_vals[w][f] > 0 or inst.firm_vals[f][w] > 0:
                adj[w].append(m + f)
                adj[m + f].append(w)
    seen = [False] * (m + n)
    assignment: list = [UNMATCHED] * m
    for start in range(m + n):
        if seen[start]:
            continue
        comp = _collect_component(adj, seen, start)
        best = _best_component_matching(inst, adj, comp)
        if best is None:
            return _zero_result(inst)
        for w, f in best.items():
            assignment[w] = f
    mu = Matching.of(assignment)
    return mu, nash_value(inst, mu)


def _collect_component(adj, seen, start) -> list[int]:
    comp = []
    stack = [start]
    seen[start] = True
    while stack:
        node = stack.pop()
        comp.append(node)
        for nb in adj[node]:
            if not seen[nb]:
                seen[nb] = True
                stack.append(nb)
    return comp


def _component_candidates(adj, comp, m) -> list[list[tuple[int, int]]]:
    """Candidate assignments for one path/cycle component, each a list of
    (worker, firm-vertex) pairs covering every component member that can be
    covered.  An empty candidate list means no assignment can give every
    member positive utility."""
    if len(comp) == 1:
        return []  # isolated agent always ends with utility 0
    degs = {v: len(adj[v]) for v in comp}
    ends = sorted(v for v in comp if degs[v] == 1)
    if not ends:  # cycle: two alternating perfect matchings
        order = _walk(adj, comp[0], None, set(comp))
        cands = []
        for offset in range(2):
            pairs = []
            for i in range(offset, len(order) + offset, 2):
                a = order[i % len(order)]
                b = order[(i + 1) % len(order)]
                pairs.append((a, b) if a < m else (b, a))
            cands.append(pairs)
        return cands
    order = _walk(adj, ends[0], None, set(comp))
    workers = [v for v in order if v < m]
    firms = [v for v in order if v >= m]
    if len(workers) == len(firms):
        # unique perfect matching: consecutive disjoint pairs along the path
        pairs = []
        for i in range(0, len(order), 2):
            a, b = order[i], order[i + 1]
            pairs.append((a, b) if a < m else (b, a))
        return [pairs]
    if len(workers) == len(firms) + 1:
        # worker-led path: one firm takes both neighbors, the rest pair up
        cands = []
        for i in range(1, len(order), 2):
            f = order[i]
            pairs = [(order[i - 1], f), (order[i + 1], f)]
            for j in range(0, i - 1, 2):
                pairs.append(_as_pair(order[j], order[j + 1], m))
            for j in range(i + 2, len(order) - 1, 2):
                pairs.append(_as_pair(order[j], order[j + 1], m))
            cands.append(pairs)
        return cands
    # firm-led path: more firms than workers, someone ends at zero
    return []


def _as_pair(a, b, m):
    return (a, b) if a < m else (b, a)


def _walk(adj, start, prev, members) -> list[int]:
    """Vertices of a path (from an endpoint) or cycle (from any vertex) in
    traversal order."""
    order = [start]
    cur, last = start, prev
    while True:
        nxt = [x for x in adj[cur] if x != last]
        if not nxt:
            break
        last, cur = cur, nxt[0]
        if cur == start:
            break
        order.append(cur)
    assert len(order) == len(members)
    return order


def _best_component_matching(inst, adj, comp) -> Optional[dict[int, int]]:
    m = inst.m
    cands = _component_candidates(adj, comp, m)
    best_prod = 0
    best = None
    for pairs in cands:
        loads: dict[int, int] = {}
        for _w, fv in pairs:
            loads[fv] = loads.get(fv, 0) + 1
        if any(cnt > inst.capacities[fv - m] for fv, cnt in loads.items()):
            continue
        prod = 1
        firm_sums: dict[int, int] = {}
        for w, fv in pairs:
            f = fv - m
            prod *= inst.worker_vals[w][f]
            firm_sums[f] = firm_sums.get(f, 0) + inst.firm_vals[f][w]
        for s in firm_sums.values():
            prod *= s
        if prod > best_prod:
            best_prod = prod
            best = {w: fv - m for w, fv in pairs}
    if best_prod == 0:
        return None
    return best


def solve_degree3_capacity2(
    inst: Instance,
) -> Optional[tuple[Matching, NashValue]]:
    """Firms of degree at most 3, each required to take exactly 2 workers.

    Returns None ("no-instance") when no such matching has positive Nash
    product.  Firm pairs sharing two neighbors are peeled off first: the
    four involved workers are forced onto those two firms, so the 6-agent
    gadget is solved by enumeration and the rest independently.  In the
    residue any two firms share at most one worker, so pairs of workers
    determine their common firm uniquely and a max-weight perfect matching
    on the worker graph (weight ln of the firm-bundle value) finds the
    optimum.
    """
    prof = degree_profile(inst)
    if max(prof.firm_degrees) > 3:
        raise DomainError("a firm has degree above 3")
    m, n = inst.m, inst.n
    if m != 2 * n or any(c < 2 for c in inst.capacities):
        return None
    # workers usable by a firm: the worker must value the firm, or its own
    # utility would be zero
    nbrs = [frozenset(w for w in range(m) if inst.worker_vals[w][f] > 0) for f in range(n)]
    live_firms = set(range(n))
    live_workers = set(range(m))
    assignment: list = [UNMATCHED] * m

    changed = True
    while changed:
        changed = False
        for f in sorted(live_firms):
            if len(nbrs[f] & live_workers) < 2:
                return None
        firms = sorted(live_firms)
        for i, f in enumerate(firms):
            nf = nbrs[f] & live_workers
            for g in firms[i + 1:]:
                ng = nbrs[g] & live_workers
                shared = nf & ng
                if len(shared) < 2:
                    continue
                if len(nf | ng) < 4:
                    return None
                # both firms draw 2 from a 4-worker pool: every split is a
                # 6-agent gadget independent of the rest
                pool = nf | ng
                best_prod = 0
                best_split = None
                for bundle_f in _pairs_within(nf):
                    rest = pool - set(bundle_f)
                    if not rest <= ng or len(rest) != 2:
                        continue
                    prod = firm_bundle_value(inst, f, bundle_f) * \
                        firm_bundle_value(inst, g, sorted(rest))
                    if prod > best_prod:
                        best_prod = prod
                        best_split = (bundle_f, sorted(rest))
                if best_prod == 0:
                    return None
                for w in best_split[0]:
                    assignment[w] = f
                for w in best_split[1]:
                    assignment[w] = g
                live_firms -= {f, g}
                live_workers -= pool
                changed = True
                break
            if changed:
                break

    firms = sorted(live_firms)
    workers = sorted(live_workers)
    if firms:
        index = {w: i for i, w in enumerate(workers)}
        edges = []
        edge_firm = {}
        for f in firms:
            pool = sorted(nbrs[f] & live_workers)
            for a, b in _pairs_within(pool):
                val = firm_bundle_value(inst, f, (a, b))
                if val > 0:
                    key = (index[a], index[b])
                    # firms pairwise share <= 1 worker here, so the common
                    # firm of a worker pair is unique
                    assert key not in edge_firm
                    edge_firm[key] = f
                    edges.append((key[0], key[1], math.log(val)))
        g = WeightedGraph.of(len(workers), edges)
        try:
            pairs, _total = max_weight_perfect_matching_general(g)
        except InfeasibleError:
            return None
        for a, b in pairs:
            f = edge_firm[(a, b)]
            assignment[workers[a]] = f
            assignment[workers[b]] = f
    mu = Matching.of(assignment)
    value = nash_value(inst, mu)
    if value.is_zero:
        return None
    return mu, value


def _pairs_within(workers) -> list[tuple[int, int]]:
    ws = sorted(workers)
    return [(ws[i], ws[j]) for i in range(len(ws)) for j in range(i + 1, len(ws))]


def solve_single_positive_firm(inst: Instance) -> tuple[Matching, NashValue]:
    """Each worker values exactly one firm positively; the only candidate
    for a nonzero product is the forced assignment.  If it breaks a
    capacity the optimum is zero; if it is feasible its (possibly zero)
    value is optimal."""
    targets = []
    for w in range(inst.m):
        positive = [f for f in range(inst.n) if inst.worker_vals[w][f] > 0]
        if len(positive) != 1:
            raise DomainError(f"worker {w} does not value exactly one firm")
        targets.append(positive[0])
    loads = [0] * inst.n
    for f in targets:
        loads[f] += 1
    if any(load > c for load, c in zip(loads, inst.capacities)):
        return _zero_result(inst)
    mu = Matching.of(targets)
    return mu, nash_value(inst, mu)
