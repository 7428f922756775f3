"""Rotations of the stable matching lattice.

A rotation is a cyclic list of matched pairs ``(a0, b0), ..., (a{r-1}, b{r-1})``;
eliminating it moves every ``a_i`` to ``b_{i+1 mod r}``.  Starting at the
agent-optimal matching and eliminating exposed rotations until the
arm-optimal matching is reached discovers every rotation exactly once.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Matching, UtilityProfile, is_stable
from .da import Side, deferred_acceptance
from .errors import (
    CyclicGraphError,
    InternalInvariantBrokenError,
    PreconditionViolatedError,
    RotationNotExposedError,
    UnstableMatchingError,
)


@dataclass(frozen=True)
class Rotation:
    """Cycle of (agent, arm) pairs, stored starting at its smallest agent."""

    cycle: tuple[tuple[int, int], ...]

    def __post_init__(self):
        cycle = tuple((int(a), int(b)) for a, b in self.cycle)
        if len(cycle) < 2:
            raise ValueError("a rotation needs at least two pairs")
        agents = [a for a, _ in cycle]
        arms = [b for _, b in cycle]
        if len(set(agents)) != len(agents) or len(set(arms)) != len(arms):
            raise ValueError(f"rotation repeats an agent or an arm: {cycle}")
        start = agents.index(min(agents))
        object.__setattr__(self, "cycle", cycle[start:] + cycle[:start])

    def __len__(self) -> int:
        return len(self.cycle)

    @property
    def agents(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.cycle)

    @property
    def arms(self) -> tuple[int, ...]:
        return tuple(b for _, b in self.cycle)

    def moves(self) -> list[tuple[int, int, int]]:
        """``(agent, old_arm, new_arm)`` for every agent in the cycle."""
        r = len(self.cycle)
        return [(a, b, self.cycle[(k + 1) % r][1]) for k, (a, b) in enumerate(self.cycle)]

    def __str__(self) -> str:
        return "(" + ", ".join(f"(a{a}, b{b})" for a, b in self.cycle) + ")"


@dataclass(frozen=True)
class RotationDigraph:
    """Rotations of one profile with node weights and predecessor edges.

    Node ids are positions in ``rotations``.  An edge ``(u, v)`` says that
    rotation ``u`` must be eliminated before rotation ``v``.
    """

    rotations: tuple[Rotation, ...]
    weights: tuple[float, ...]
    elimination_order: tuple[int, ...]
    edges: frozenset[tuple[int, int]] = frozenset()
    agent_optimal: Matching | None = None
    arm_optimal: Matching | None = None
    # pair (agent, arm) -> rotation that removed the arm's interest in that agent
    eliminated_pairs: dict = field(default_factory=dict, compare=False, repr=False)
    exact_weights: tuple[Fraction, ...] = field(default=(), compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.rotations)

    def predecessors(self, node: int) -> list[int]:
        return sorted(u for u, v in self.edges if v == node)

    def successors(self, node: int) -> list[int]:
        return sorted(v for u, v in self.edges if u == node)

    def with_edges(self, edges: Iterable[tuple[int, int]]) -> RotationDigraph:
        return RotationDigraph(
            rotations=self.rotations,
            weights=self.weights,
            elimination_order=self.elimination_order,
            edges=frozenset(edges),
            agent_optimal=self.agent_optimal,
            arm_optimal=self.arm_optimal,
            eliminated_pairs=self.eliminated_pairs,
            exact_weights=self.exact_weights,
        )

    def is_closed(self, subset: Iterable[int]) -> bool:
        chosen = set(subset)
        return all(u in chosen for u, v in self.edges if v in chosen)

    def matching_for(self, subset: Iterable[int]) -> Matching:
        """Eliminate ``subset`` from the agent-optimal matching in discovery order."""
        chosen = set(subset)
        m = self.agent_optimal
        for node in self.elimination_order:
            if node in chosen:
                m = eliminate_rotation(m, self.rotations[node])
        return m


def _require_stable(profile: UtilityProfile, matching: Matching) -> None:
    report = is_stable(profile, matching)
    if not report.stable:
        raise UnstableMatchingError(f"matching {matching} has blocking pairs {list(report.blocking_pairs)}")


def _next_pointer(profile: UtilityProfile, matching: Matching, agent: int) -> tuple[int, int]:
    """First arm below the agent's partner that would accept it, and that arm's mate."""
    prefs = profile.agent_prefs[agent]
    start = profile.agent_rank[agent][matching.arm_of(agent)] + 1
    for arm in prefs[start:]:
        mate = matching.agent_of(arm)
        if profile.arm_prefers(arm, agent, mate):
            return arm, mate
    raise InternalInvariantBrokenError(f"agent {agent} exhausted its list below {matching.arm_of(agent)}")


def break_matching(profile: UtilityProfile, matching: Matching, agent: int, *,
                   arm_optimal: Matching | None = None, check_stable: bool = True) -> tuple[Rotation, Matching]:
    """Free ``agent``, make its arm semi-free and follow the proposals it triggers.

    Every displaced agent moves to the first arm below its partner that
    prefers it to that arm's current mate.  The walk stops the first time it
    returns to an agent already on it; that cycle is a rotation exposed in
    ``matching``.  Returns the rotation and the stable matching obtained by
    eliminating it.
    """
    if check_stable:
        _require_stable(profile, matching)
    if arm_optimal is None:
        arm_optimal = deferred_acceptance(profile, Side.ARMS)
    if matching.arm_of(agent) == arm_optimal.arm_of(agent):
        raise PreconditionViolatedError(f"agent {agent} is already with its arm-optimal partner")

    path = [agent]
    position = {agent: 0}
    x = agent
    while True:
        if matching.arm_of(x) == arm_optimal.arm_of(x):
            raise InternalInvariantBrokenError(f"walk reached agent {x} at its arm-optimal partner")
        _, mate = _next_pointer(profile, matching, x)
        if mate in position:
            cycle = path[position[mate]:]
            break
        position[mate] = len(path)
        path.append(mate)
        x = mate
    rotation = Rotation(tuple((a, matching.arm_of(a)) for a in cycle))
    return rotation, eliminate_rotation(matching, rotation)


def break_marriage(profile: UtilityProfile, matching: Matching, agent: int, *,
                   arm_optimal: Matching | None = None) -> Matching:
    """Full deferred-acceptance run after breaking ``agent``'s pair.

    The freed arm accepts only a proposer it strictly prefers to ``agent``;
    every other arm keeps its mate until a better proposal arrives.  The run
    ends when the freed arm accepts.  The result is the best stable matching
    for the agents below ``matching`` in which ``agent`` has a new partner.
    """
    if arm_optimal is None:
        arm_optimal = deferred_acceptance(profile, Side.ARMS)
    if matching.arm_of(agent) == arm_optimal.arm_of(agent):
        raise PreconditionViolatedError(f"agent {agent} is already with its arm-optimal partner")

    n = profile.n
    partner = list(matching.pairs)
    holder = list(matching.inverse)
    semi_free = partner[agent]
    holder[semi_free] = -1
    cursor = [profile.agent_rank[i][partner[i]] + 1 for i in range(n)]
    x = agent
    while True:
        if cursor[x] >= n:
            raise InternalInvariantBrokenError(f"agent {x} ran out of arms during break-marriage")
        y = profile.agent_prefs[x][cursor[x]]
        cursor[x] += 1
        if y == semi_free:
            if profile.arm_prefers(y, x, agent):
                holder[y] = x
                partner[x] = y
                break
            continue
        current = holder[y]
        if profile.arm_prefers(y, x, current):
            holder[y] = x
            partner[x] = y
            x = current
    return Matching(tuple(partner))


def eliminate_rotation(matching: Matching, rotation: Rotation) -> Matching:
    pairs = list(matching.pairs)
    for a, b in rotation.cycle:
        if a >= len(pairs) or pairs[a] != b:
            raise RotationNotExposedError(f"pair (a{a}, b{b}) of rotation {rotation} is not in {matching}")
    for a, _, new in rotation.moves():
        pairs[a] = new
    return Matching(tuple(pairs))


def exact_rotation_weight(profile: UtilityProfile, rotation: Rotation) -> Fraction:
    """Welfare lost by eliminating ``rotation``, in exact rational arithmetic."""
    mu_a = profile.agent_utilities
    mu_b = profile.arm_utilities
    cycle = rotation.cycle
    r = len(cycle)
    total = Fraction(0)
    for k, (a, b) in enumerate(cycle):
        total += Fraction(float(mu_a[a, b])) - Fraction(float(mu_a[a, cycle[(k + 1) % r][1]]))
    for k, (a, b) in enumerate(cycle):
        total += Fraction(float(mu_b[b, a])) - Fraction(float(mu_b[b, cycle[(k - 1) % r][0]]))
    return total


def rotation_weight(profile: UtilityProfile, rotation: Rotation) -> float:
    """Utilitarian welfare lost by eliminating ``rotation``.

    Sum over the cycle of each agent's utility drop from ``b_i`` to
    ``b_{i+1}`` plus each arm's drop from ``a_j`` to ``a_{j-1}``.  A negative
    weight means the elimination raises welfare.
    """
    return float(exact_rotation_weight(profile, rotation))


def _record_eliminations(profile: UtilityProfile, rotation: Rotation, node: int,
                         m_a: Matching, m_b: Matching, out: dict) -> None:
    # Arm b moves from a_j up to a_{j-1}; agents strictly between the two in
    # b's list lose b for good.  Only pairs inside the agents' stable range
    # (between their agent-optimal and arm-optimal partners) count.
    cycle = rotation.cycle
    r = len(cycle)
    for k, (old_agent, arm) in enumerate(cycle):
        new_agent = cycle[(k - 1) % r][0]
        prefs = profile.arm_prefs[arm]
        lo = profile.arm_rank[arm][new_agent]
        hi = profile.arm_rank[arm][old_agent]
        for agent in prefs[lo + 1:hi]:
            rank = profile.agent_rank[agent]
            if rank[m_a.arm_of(agent)] <= rank[arm] <= rank[m_b.arm_of(agent)]:
                out.setdefault((agent, arm), node)


def enumerate_rotations(profile: UtilityProfile) -> RotationDigraph:
    """Walk from the agent-optimal to the arm-optimal matching, one rotation at a time.

    The agent broken at each step is the lowest-index agent not yet at its
    arm-optimal partner, so the discovery order is deterministic.  The result
    has no edges; see :func:`sparse_predecessor_digraph`.
    """
    m_a = deferred_acceptance(profile, Side.AGENTS)
    m_b = deferred_acceptance(profile, Side.ARMS)
    rotations: list[Rotation] = []
    seen: set[Rotation] = set()
    eliminated: dict = {}
    m = m_a
    limit = profile.n * profile.n
    while m != m_b:
        if len(rotations) > limit:
            raise InternalInvariantBrokenError("more rotations than agent-arm pairs")
        agent = next(i for i in range(profile.n) if m.arm_of(i) != m_b.arm_of(i))
        rotation, m = break_matching(profile, m, agent, arm_optimal=m_b, check_stable=False)
        if rotation in seen:
            raise InternalInvariantBrokenError(f"rotation {rotation} discovered twice")
        seen.add(rotation)
        _record_eliminations(profile, rotation, len(rotations), m_a, m_b, eliminated)
        rotations.append(rotation)
    exact = tuple(exact_rotation_weight(profile, rho) for rho in rotations)
    return RotationDigraph(
        rotations=tuple(rotations),
        weights=tuple(float(w) for w in exact),
        elimination_order=tuple(range(len(rotations))),
        agent_optimal=m_a,
        arm_optimal=m_b,
        eliminated_pairs=eliminated,
        exact_weights=exact,
    )


def topological_order(n_nodes: int, edges: Iterable[tuple[int, int]], tie_order: Sequence[int] | None = None) -> list[int]:
    """Kahn's algorithm, preferring nodes earlier in ``tie_order``; raises on a cycle."""
    rank = {node: k for k, node in enumerate(tie_order if tie_order is not None else range(n_nodes))}
    indegree = [0] * n_nodes
    succ: list[list[int]] = [[] for _ in range(n_nodes)]
    for u, v in set(edges):
        succ[u].append(v)
        indegree[v] += 1
    heap = [(rank[v], v) for v in range(n_nodes) if indegree[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, u = heapq.heappop(heap)
        order.append(u)
        for v in succ[u]:
            indegree[v] -= 1
            if indegree[v] == 0:
                heapq.heappush(heap, (rank[v], v))
    if len(order) != n_nodes:
        raise CyclicGraphError("predecessor graph has a cycle")
    return order


def sparse_predecessor_digraph(profile: UtilityProfile, rotations: RotationDigraph) -> RotationDigraph:
    """Add the O(n^2) predecessor edges that preserve the closed subsets.

    (i) if ``(a, b)`` is in rotation ``p`` and ``b'`` is the next arm below
    ``b`` in ``a``'s list with ``(a, b')`` in a rotation ``q``, add ``p -> q``;
    (ii) if ``(a, b')`` is in no rotation but is eliminated by ``q``, and
    ``b`` is the nearest arm above ``b'`` in ``a``'s list with ``(a, b)`` in a
    rotation ``p``, add ``q -> p``: ``p`` would otherwise move ``a`` onto
    ``b'``.
    """
    member: dict[tuple[int, int], int] = {}
    for node, rho in enumerate(rotations.rotations):
        for pair in rho.cycle:
            member[pair] = node

    edges: set[tuple[int, int]] = set()
    for agent in range(profile.n):
        last = None  # nearest rotation pair seen so far, walking down the list
        for arm in profile.agent_prefs[agent]:
            node = member.get((agent, arm))
            if node is not None:
                if last is not None and last != node:
                    edges.add((last, node))
                last = node
                continue
            q = rotations.eliminated_pairs.get((agent, arm))
            if q is not None and last is not None and last != q:
                # the agent can only slide past ``arm`` once q has removed it
                edges.add((q, last))

    graph = rotations.with_edges(edges)
    topological_order(len(graph), graph.edges)
    return graph


def rotation_digraph(profile: UtilityProfile) -> RotationDigraph:
    """Rotations plus sparse predecessor edges, ready for closure optimization."""
    return sparse_predecessor_digraph(profile, enumerate_rotations(profile))


def reachable_matchings(graph: RotationDigraph) -> set[Matching]:
    """Matchings produced by every closed subset (exhaustive, for small graphs)."""
    return {graph.matching_for(subset) for subset in closed_subsets(len(graph), graph.edges)}


def closed_subsets(n_nodes: int, edges: Iterable[tuple[int, int]]) -> list[frozenset[int]]:
    edges = list(edges)
    preds = [0] * n_nodes
    for u, v in edges:
        preds[v] |= 1 << u
    result = []
    for mask in range(1 << n_nodes):
        if all(not (mask >> v) & 1 or (preds[v] & mask) == preds[v] for v in range(n_nodes)):
            result.append(frozenset(v for v in range(n_nodes) if (mask >> v) & 1))
    return result


__all__ = [
    "Rotation",
    "RotationDigraph",
    "break_marriage",
    "break_matching",
    "closed_subsets",
    "eliminate_rotation",
    "enumerate_rotations",
    "exact_rotation_weight",
    "reachable_matchings",
    "rotation_digraph",
    "rotation_weight",
    "sparse_predecessor_digraph",
    "topological_order",
]
