import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import reference as ref
from welfare_matching import fixtures
from welfare_matching.core import utilitarian_welfare, validate_profile
from welfare_matching.errors import CyclicGraphError
from welfare_matching.opt import FlowNetwork, max_flow_min_cut, min_weight_closed_subset, utilitarian_optimal


def test_textbook_network():
    arcs = [(0, 1, 10), (0, 2, 10), (1, 2, 2), (1, 3, 4), (1, 4, 8), (2, 4, 9), (4, 3, 6), (3, 5, 10), (4, 5, 10)]
    res = max_flow_min_cut(FlowNetwork(6, 0, 5, arcs))
    assert res.value == 19
    net = FlowNetwork(6, 0, 5, arcs)
    assert net.cut_capacity(res.source_side) == 19
    assert 0 in res.source_side and 5 in res.sink_side


@pytest.mark.parametrize(
    "sink, arcs",
    [
        (2, [(0, 1, -1)]),  # negative capacity
        (2, [(1, 0, 1)]),  # into the source
        (1, [(1, 2, 1), (0, 1, 1)]),  # out of the sink
        (2, [(0, 1, math.inf), (1, 2, math.inf)]),  # unbounded cut
    ],
)
def test_rejects_bad_networks(sink, arcs):
    with pytest.raises(ValueError):
        FlowNetwork(3, 0, sink, arcs)


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_flow_value_matches_networkx(n, seed):
    rng = np.random.default_rng(seed)
    G = nx.DiGraph()
    G.add_nodes_from(range(n))
    arcs = []
    for u in range(n - 1):
        for v in range(1, n):
            if u != v and rng.random() < 0.4:
                c = int(rng.integers(0, 20))
                arcs.append((u, v, c))
                G.add_edge(u, v, capacity=c)
    res = max_flow_min_cut(FlowNetwork(n, 0, n - 1, arcs))
    assert res.value == nx.maximum_flow_value(G, 0, n - 1)
    # flow conservation and capacity
    net = FlowNetwork(n, 0, n - 1, arcs)
    balance = [Fraction(0)] * n
    for (u, v, c), f in zip(net.arcs, res.arc_flows):
        assert 0 <= f <= c
        balance[u] -= f
        balance[v] += f
    assert all(b == 0 for k, b in enumerate(balance) if k not in (0, n - 1))
    assert net.cut_capacity(res.source_side) == res.value


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_closed_subset_matches_brute_force(k, seed):
    rng = np.random.default_rng(seed)
    weights = [int(w) for w in rng.integers(-5, 6, k)]
    order = rng.permutation(k)
    edges = [(int(order[i]), int(order[j])) for i in range(k) for j in range(i + 1, k) if rng.random() < 0.3]
    best = min_weight_closed_subset(weights, edges)
    assert best.weight == ref.min_closed_weight(weights, edges)
    assert all(u in best.nodes for u, v in edges if v in best.nodes)


def test_closed_subset_prefers_fewer_nodes():
    # zero-weight node joins only when it is needed
    assert min_weight_closed_subset([0, -1], []).nodes == frozenset({1})
    assert min_weight_closed_subset([0, -1], [(0, 1)]).nodes == frozenset({0, 1})
    assert min_weight_closed_subset([0, 0], []).nodes == frozenset()


def test_closed_subset_rejects_cycles():
    with pytest.raises(CyclicGraphError):
        min_weight_closed_subset([1, -1], [(0, 1), (1, 0)])


def test_cyclic_utilitarian(cyclic):
    m = utilitarian_optimal(cyclic)
    assert m == fixtures.matching("cyclic_4x4", "utilitarian")
    assert utilitarian_welfare(cyclic, m) == 18.0


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1), st.booleans())
def test_utilitarian_matches_reference(n, seed, real):
    rng = np.random.default_rng(seed)
    a, b = ref.random_real_profile(rng, n) if real else ref.random_profile(rng, n)
    p = validate_profile(a, b)
    m = utilitarian_optimal(p)
    assert not ref.blocking(a.tolist(), b.tolist(), m.pairs)
    best, _ = ref.best_values(a.tolist(), b.tolist())
    assert ref.welfare(a.tolist(), b.tolist(), m.pairs) == pytest.approx(best, abs=1e-9)
