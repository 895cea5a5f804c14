import itertools
import math
import random

import pytest

from nswmatch.graphalgs import (
    FlowNetwork,
    InfeasibleError,
    WeightedGraph,
    feasible_flow_with_lower_bounds,
    max_weight_bipartite_matching,
    max_weight_perfect_matching_general,
)


def test_weighted_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph.of(2, [(0, 0, 1.0)])
    with pytest.raises(ValueError):
        WeightedGraph.of(2, [(0, 3, 1.0)])
    with pytest.raises(ValueError):
        WeightedGraph.of(2, [(0, 1, float("inf"))])


def test_bipartite_crossing_weights():
    # positive-product edges of the motivating example, weight ln(v*v)
    g = WeightedGraph.of(4, [(0, 3, math.log(4)), (1, 2, math.log(4))])
    pairs, total = max_weight_bipartite_matching(g, 2, 2, require_left_saturated=True)
    assert pairs == [(0, 3), (1, 2)]
    assert math.isclose(total, math.log(16))


def test_bipartite_single_edge():
    g = WeightedGraph.of(2, [(0, 1, 5.0)])
    pairs, total = max_weight_bipartite_matching(g, 1, 1)
    assert pairs == [(0, 1)] and total == 5.0


def test_bipartite_matches_permutation_enumeration():
    rng = random.Random(4)
    for _ in range(100):
        k = 3
        weights = [[rng.uniform(0.1, 5) for _ in range(k)] for _ in range(k)]
        g = WeightedGraph.of(2 * k, [(i, k + j, weights[i][j])
                                     for i in range(k) for j in range(k)])
        _pairs, total = max_weight_bipartite_matching(g, k, k,
                                                      require_left_saturated=True)
        best = max(sum(weights[i][p[i]] for i in range(k))
                   for p in itertools.permutations(range(k)))
        assert math.isclose(total, best)


def test_bipartite_saturation_infeasible():
    g = WeightedGraph.of(3, [(0, 2, 1.0), (1, 2, 1.0)])
    with pytest.raises(InfeasibleError):
        max_weight_bipartite_matching(g, 2, 1, require_left_saturated=True)


def test_perfect_matching_four_cycle():
    g = WeightedGraph.of(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 0, 2.0)])
    pairs, total = max_weight_perfect_matching_general(g)
    assert total == 4.0
    assert pairs == [(0, 3), (1, 2)]


def test_perfect_matching_odd_infeasible():
    g = WeightedGraph.of(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    with pytest.raises(InfeasibleError):
        max_weight_perfect_matching_general(g)


def test_perfect_matching_k4_enumeration():
    rng = random.Random(8)
    for _ in range(100):
        w = {(i, j): rng.uniform(0.1, 5) for i in range(4) for j in range(i + 1, 4)}
        g = WeightedGraph.of(4, [(i, j, x) for (i, j), x in w.items()])
        _pairs, total = max_weight_perfect_matching_general(g)
        best = max(w[(0, 1)] + w[(2, 3)], w[(0, 2)] + w[(1, 3)],
                   w[(0, 3)] + w[(1, 2)])
        assert math.isclose(total, best)


def test_perfect_matching_cardinality():
    # unweighted path of 6 vertices has exactly one perfect matching
    g = WeightedGraph.of(6, [(i, i + 1, 1.0) for i in range(5)])
    pairs, _ = max_weight_perfect_matching_general(g)
    assert pairs == [(0, 1), (2, 3), (4, 5)]


def test_flow_single_arc():
    net = FlowNetwork(2, 0, 1)
    net.add_arc(0, 1, 1, 1)
    assert feasible_flow_with_lower_bounds(net) == [1]


def test_flow_bad_bounds_rejected():
    net = FlowNetwork(2, 0, 1)
    with pytest.raises(ValueError):
        net.add_arc(0, 1, 2, 1)


def _enumerate_flows(net):
    """All integral arc-flow vectors meeting bounds and conservation at
    internal nodes, allowing net source->sink throughput."""
    ranges = [range(lo, hi + 1) for _u, _v, lo, hi in net.arcs]
    for combo in itertools.product(*ranges):
        balance = [0] * net.num_nodes
        for (u, v, _lo, _hi), x in zip(net.arcs, combo):
            balance[u] -= x
            balance[v] += x
        ok = all(balance[i] == 0 for i in range(net.num_nodes)
                 if i not in (net.source, net.sink))
        if ok and balance[net.sink] >= 0 and balance[net.sink] == -balance[net.source]:
            return list(combo)
    return None


def test_flow_agrees_with_exhaustive_search():
    rng = random.Random(12)
    for _ in range(120):
        nodes = rng.randint(3, 5)
        net = FlowNetwork(nodes, 0, nodes - 1)
        for _ in range(rng.randint(2, 6)):
            u, v = rng.sample(range(nodes), 2)
            lo = rng.randint(0, 2)
            hi = lo + rng.randint(0, 2)
            net.add_arc(u, v, lo, hi)
        got = feasible_flow_with_lower_bounds(net)
        expect = _enumerate_flows(net)
        assert (got is None) == (expect is None)
        if got is not None:
            balance = [0] * nodes
            for (u, v, lo, hi), x in zip(net.arcs, got):
                assert lo <= x <= hi
                balance[u] -= x
                balance[v] += x
            for i in range(nodes):
                if i not in (net.source, net.sink):
                    assert balance[i] == 0
