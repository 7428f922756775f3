"""Utilitarian-optimal stable matching via a minimum-weight closed set of rotations.

The closed set is found with the project-selection reduction: positive
rotations hang off the source, negative rotations feed the sink and every
predecessor edge gets infinite capacity.  The sink side of a minimum cut is
then a minimum-weight predecessor-closed set.  All capacities are handled as
exact rationals so ties are resolved exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

from .core import Matching, UtilityProfile
from .errors import CyclicGraphError
from .rotations import RotationDigraph, rotation_digraph, topological_order

INFINITY = math.inf


def _exact(value) -> Fraction | float:
    if value == INFINITY:
        return INFINITY
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(float(value))


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network on nodes ``0..n_nodes-1`` with capacitated arcs."""

    n_nodes: int
    source: int
    sink: int
    arcs: tuple[tuple[int, int, Fraction | float], ...]

    def __post_init__(self):
        arcs = tuple((int(u), int(v), _exact(c)) for u, v, c in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for u, v, c in arcs:
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"arc ({u}, {v}) leaves the node range")
            if c < 0:
                raise ValueError(f"arc ({u}, {v}) has negative capacity {c}")
            if v == self.source:
                raise ValueError(f"arc ({u}, {v}) enters the source")
            if u == self.sink:
                raise ValueError(f"arc ({u}, {v}) leaves the sink")
        # an all-infinite s-t path would make the cut unbounded
        inf_adj: dict[int, list[int]] = {}
        for u, v, c in arcs:
            if c == INFINITY:
                inf_adj.setdefault(u, []).append(v)
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            for v in inf_adj.get(u, ()):
                if v == self.sink:
                    raise ValueError("network has an infinite-capacity source-sink path")
                if v not in seen:
                    seen.add(v)
                    queue.append(v)

    def cut_capacity(self, source_side: Iterable[int]) -> Fraction | float:
        side = set(source_side)
        return sum((c for u, v, c in self.arcs if u in side and v not in side), Fraction(0))


@dataclass(frozen=True)
class FlowResult:
    value: Fraction
    source_side: frozenset[int]
    sink_side: frozenset[int]
    arc_flows: tuple[Fraction, ...] = field(repr=False)


def max_flow_min_cut(network: FlowNetwork) -> FlowResult:
    """Edmonds-Karp maximum flow with the two extreme minimum cuts.

    ``source_side`` is everything reachable from the source in the final
    residual graph (the smallest source side); ``sink_side`` is everything
    that can still reach the sink (the smallest sink side).
    """
    n = network.n_nodes
    s, t = network.source, network.sink
    # residual arcs stored in pairs: 2k forward, 2k+1 backward
    head: list[int] = []
    cap: list[Fraction | float] = []
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, c in network.arcs:
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        adj[v].append(len(head))
        head.append(u)
        cap.append(Fraction(0))

    total = Fraction(0)
    while True:
        parent_arc = [-1] * n
        parent_arc[s] = -2
        queue = deque([s])
        while queue and parent_arc[t] == -1:
            u = queue.popleft()
            for a in adj[u]:
                v = head[a]
                if parent_arc[v] == -1 and cap[a] > 0:
                    parent_arc[v] = a
                    queue.append(v)
        if parent_arc[t] == -1:
            break
        bottleneck: Fraction | float = INFINITY
        v = t
        while v != s:
            a = parent_arc[v]
            bottleneck = min(bottleneck, cap[a])
            v = head[a ^ 1]
        v = t
        while v != s:
            a = parent_arc[v]
            cap[a] -= bottleneck
            cap[a ^ 1] += bottleneck
            v = head[a ^ 1]
        total += bottleneck

    reach_from_s = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for a in adj[u]:
            v = head[a]
            if v not in reach_from_s and cap[a] > 0:
                reach_from_s.add(v)
                queue.append(v)

    # reverse residual search: u reaches t if some residual arc u->v has v reaching t
    reach_t = {t}
    queue = deque([t])
    while queue:
        v = queue.popleft()
        for a in adj[v]:
            u = head[a]
            # arc a is v->u; its partner a^1 is u->v
            if u not in reach_t and cap[a ^ 1] > 0:
                reach_t.add(u)
                queue.append(u)

    flows = tuple(cap[2 * k + 1] for k in range(len(network.arcs)))
    return FlowResult(
        value=total,
        source_side=frozenset(reach_from_s),
        sink_side=frozenset(reach_t),
        arc_flows=flows,
    )


@dataclass(frozen=True)
class ClosedSubset:
    nodes: frozenset[int]
    weight: Fraction

    def __contains__(self, node: int) -> bool:
        return node in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)


def closure_network(weights: Sequence[Real], edges: Iterable[tuple[int, int]]) -> FlowNetwork:
    """Source feeds positive nodes, negative nodes feed the sink, edges are uncuttable."""
    k = len(weights)
    s, t = k, k + 1
    arcs = []
    for v, w in enumerate(weights):
        w = _exact(w)
        if w > 0:
            arcs.append((s, v, w))
        elif w < 0:
            arcs.append((v, t, -w))
    for u, v in sorted(set(edges)):
        arcs.append((u, v, INFINITY))
    return FlowNetwork(k + 2, s, t, tuple(arcs))


def min_weight_closed_subset(weights: Sequence[Real], edges: Iterable[tuple[int, int]]) -> ClosedSubset:
    """Predecessor-closed node set of minimum total weight.

    An edge ``(u, v)`` means ``v`` may only be chosen together with ``u``.
    Among equally light closed sets the smallest one (the intersection of all
    optimal sets) is returned, so zero-weight nodes enter only when some
    chosen node needs them.
    """
    edges = list(edges)
    k = len(weights)
    topological_order(k, edges)  # raises CyclicGraphError
    if k == 0:
        return ClosedSubset(frozenset(), Fraction(0))
    result = max_flow_min_cut(closure_network(weights, edges))
    chosen = frozenset(v for v in result.sink_side if v < k)
    exact = [_exact(w) for w in weights]
    return ClosedSubset(chosen, sum((exact[v] for v in chosen), Fraction(0)))


def min_weight_closed_subset_of(graph: RotationDigraph) -> ClosedSubset:
    weights = graph.exact_weights or graph.weights
    return min_weight_closed_subset(weights, graph.edges)


def utilitarian_optimal(profile: UtilityProfile) -> Matching:
    """Stable matching of maximum total utility over both sides."""
    graph = rotation_digraph(profile)
    return graph.matching_for(min_weight_closed_subset_of(graph).nodes)


__all__ = [
    "ClosedSubset",
    "CyclicGraphError",
    "FlowNetwork",
    "FlowResult",
    "closure_network",
    "max_flow_min_cut",
    "min_weight_closed_subset",
    "min_weight_closed_subset_of",
    "utilitarian_optimal",
]
