"""Market data types, stability checks, welfare functions and preference gaps.

Agents and arms are both indexed from 0.  ``agent_utilities[i][j]`` is agent
``i``'s mean utility for arm ``j`` and ``arm_utilities[j][i]`` is arm ``j``'s
mean utility for agent ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NegativeUtilityError,
    NonFiniteError,
    OracleTooLargeError,
    TiedUtilitiesError,
)

INF = math.inf


def _preference_lists(utilities: np.ndarray) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    # Descending utility; equal values fall back to the lower index so that
    # estimated (possibly tied) profiles still induce a total order.
    prefs = []
    ranks = []
    for row in utilities:
        order = sorted(range(len(row)), key=lambda k: (-row[k], k))
        rank = [0] * len(row)
        for pos, k in enumerate(order):
            rank[k] = pos
        prefs.append(tuple(order))
        ranks.append(tuple(rank))
    return tuple(prefs), tuple(ranks)


@dataclass(frozen=True, eq=False)
class UtilityProfile:
    """Cardinal preferences of both sides of an N x N market.

    The constructor only checks shapes.  Use :func:`validate_profile` for the
    full set of market assumptions (finite, non-negative, strict); estimated
    profiles built from noisy samples are allowed to violate them.
    """

    agent_utilities: np.ndarray
    arm_utilities: np.ndarray
    agent_prefs: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    agent_rank: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    arm_prefs: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    arm_rank: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        agent = np.array(self.agent_utilities, dtype=float)
        arm = np.array(self.arm_utilities, dtype=float)
        if agent.ndim != 2 or agent.shape[0] != agent.shape[1] or agent.shape[0] == 0:
            raise DimensionMismatchError(f"agent utilities must be a non-empty square matrix, got shape {agent.shape}")
        if arm.shape != agent.shape:
            raise DimensionMismatchError(f"arm utilities shape {arm.shape} does not match agent utilities {agent.shape}")
        agent.setflags(write=False)
        arm.setflags(write=False)
        object.__setattr__(self, "agent_utilities", agent)
        object.__setattr__(self, "arm_utilities", arm)
        agent_prefs, agent_rank = _preference_lists(agent)
        arm_prefs, arm_rank = _preference_lists(arm)
        object.__setattr__(self, "agent_prefs", agent_prefs)
        object.__setattr__(self, "agent_rank", agent_rank)
        object.__setattr__(self, "arm_prefs", arm_prefs)
        object.__setattr__(self, "arm_rank", arm_rank)

    @property
    def n(self) -> int:
        return self.agent_utilities.shape[0]

    def __eq__(self, other):
        if not isinstance(other, UtilityProfile):
            return NotImplemented
        return np.array_equal(self.agent_utilities, other.agent_utilities) and np.array_equal(
            self.arm_utilities, other.arm_utilities
        )

    def __hash__(self):
        return hash((self.agent_utilities.tobytes(), self.arm_utilities.tobytes()))

    def agent_prefers(self, agent: int, arm: int, other_arm: int) -> bool:
        """True when ``agent`` strictly prefers ``arm`` to ``other_arm``."""
        rank = self.agent_rank[agent]
        return rank[arm] < rank[other_arm]

    def arm_prefers(self, arm: int, agent: int, other_agent: int) -> bool:
        rank = self.arm_rank[arm]
        return rank[agent] < rank[other_agent]

    def swapped(self) -> UtilityProfile:
        """The same market with the roles of agents and arms exchanged."""
        return UtilityProfile(self.arm_utilities, self.agent_utilities)

    def permuted(self, agent_perm: Sequence[int], arm_perm: Sequence[int]) -> UtilityProfile:
        """Relabel so that old agent ``agent_perm[k]`` becomes agent ``k`` (same for arms)."""
        ap = np.asarray(agent_perm)
        bp = np.asarray(arm_perm)
        return UtilityProfile(self.agent_utilities[np.ix_(ap, bp)], self.arm_utilities[np.ix_(bp, ap)])


@dataclass(frozen=True)
class Matching:
    """A perfect matching; ``pairs[i]`` is the arm assigned to agent ``i``."""

    pairs: tuple[int, ...]
    _inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple(int(j) for j in self.pairs)
        n = len(pairs)
        if sorted(pairs) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {pairs}")
        inverse = [0] * n
        for i, j in enumerate(pairs):
            inverse[j] = i
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "_inverse", tuple(inverse))

    @classmethod
    def identity(cls, n: int) -> Matching:
        return cls(tuple(range(n)))

    @classmethod
    def from_agent_pairs(cls, items: Iterable[tuple[int, int]]) -> Matching:
        mapping = dict(items)
        return cls(tuple(mapping[i] for i in range(len(mapping))))

    @property
    def n(self) -> int:
        return len(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def arm_of(self, agent: int) -> int:
        return self.pairs[agent]

    def agent_of(self, arm: int) -> int:
        return self._inverse[arm]

    @property
    def inverse(self) -> tuple[int, ...]:
        """``inverse[j]`` is the agent matched to arm ``j``."""
        return self._inverse

    def items(self) -> list[tuple[int, int]]:
        return list(enumerate(self.pairs))

    def format_lines(self) -> list[str]:
        return [f"a{i} -> b{j}" for i, j in enumerate(self.pairs)]

    def __str__(self) -> str:
        return "{" + ", ".join(self.format_lines()) + "}"


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    blocking_pairs: tuple[tuple[int, int], ...]

    def __bool__(self) -> bool:
        return self.stable


@dataclass(frozen=True)
class GapReport:
    """Instance separation constants.

    Attributes:
        delta_a, delta_b: within-side minimum preference gaps.
        gamma_a, gamma_b, gamma: cross-side minimum preference gaps.
        delta_welfare: utilitarian welfare gap between the best and the second
            best stable matching; ``inf`` if the stable matching is unique and
            ``None`` if it was not computed (market above the oracle cap).
        beta: ``min(delta_welfare / 4n, delta_a / 2, delta_b / 2)``, ``None``
            when ``delta_welfare`` is ``None``.
    """

    delta_a: float
    delta_b: float
    gamma_a: float
    gamma_b: float
    gamma: float
    delta_welfare: float | None
    beta: float | None


def validate_profile(agent_utilities, arm_utilities) -> UtilityProfile:
    """Check the market assumptions and build a :class:`UtilityProfile`.

    Raises:
        DimensionMismatchError: matrices are not square or differ in size.
        NonFiniteError: a NaN or infinite entry.
        NegativeUtilityError: a negative entry.
        TiedUtilitiesError: two equal entries within one row.
    """
    try:
        agent = np.array(agent_utilities, dtype=float)
        arm = np.array(arm_utilities, dtype=float)
    except ValueError as exc:  # ragged rows
        raise DimensionMismatchError(str(exc)) from exc
    profile = UtilityProfile(agent, arm)
    for name, mat in (("agent", profile.agent_utilities), ("arm", profile.arm_utilities)):
        if not np.all(np.isfinite(mat)):
            raise NonFiniteError(f"{name} utilities contain a non-finite value")
        if np.any(mat < 0):
            raise NegativeUtilityError(f"{name} utilities contain a negative value")
        for row_index, row in enumerate(mat):
            if len(np.unique(row)) != len(row):
                raise TiedUtilitiesError(f"{name} {row_index} has tied utilities: {row.tolist()}")
    return profile


def _check_dims(profile: UtilityProfile, matching: Matching) -> None:
    if matching.n != profile.n:
        raise DimensionMismatchError(f"matching has {matching.n} agents, profile has {profile.n}")


def blocking_pairs(profile: UtilityProfile, matching: Matching) -> list[tuple[int, int]]:
    _check_dims(profile, matching)
    found = []
    for i in range(profile.n):
        current = matching.arm_of(i)
        for j in profile.agent_prefs[i]:
            if j == current:
                break
            if profile.arm_prefers(j, i, matching.agent_of(j)):
                found.append((i, j))
    found.sort()
    return found


def is_stable(profile: UtilityProfile, matching: Matching) -> StabilityReport:
    pairs = blocking_pairs(profile, matching)
    return StabilityReport(stable=not pairs, blocking_pairs=tuple(pairs))


def utilitarian_welfare(profile: UtilityProfile, matching: Matching) -> float:
    """Sum of matched utilities over all agents and then all arms."""
    _check_dims(profile, matching)
    total = 0.0
    for i in range(profile.n):
        total += float(profile.agent_utilities[i, matching.arm_of(i)])
    for j in range(profile.n):
        total += float(profile.arm_utilities[j, matching.agent_of(j)])
    return total


def matched_utilities(profile: UtilityProfile, matching: Matching) -> tuple[list[float], list[float]]:
    """Matched utility of every agent and of every arm."""
    _check_dims(profile, matching)
    agents = [float(profile.agent_utilities[i, matching.arm_of(i)]) for i in range(profile.n)]
    arms = [float(profile.arm_utilities[j, matching.agent_of(j)]) for j in range(profile.n)]
    return agents, arms


def maximin_welfare(profile: UtilityProfile, matching: Matching) -> float:
    agents, arms = matched_utilities(profile, matching)
    return min(min(agents), min(arms))


def _within_side_gap(mat: np.ndarray) -> float:
    gap = INF
    for row in mat:
        values = np.sort(row)
        if len(values) > 1:
            gap = min(gap, float(np.min(np.diff(values))))
    return gap


def _cross_side_gap(mat: np.ndarray) -> float:
    values = np.unique(mat)
    if len(values) < 2:
        return INF
    return float(np.min(np.diff(values)))


def preference_gaps(profile: UtilityProfile, *, with_delta: bool | None = None,
                    oracle_cap: int | None = None) -> GapReport:
    """Compute the within-side, cross-side and welfare gaps of ``profile``.

    ``with_delta=None`` computes the welfare gap whenever the market fits under
    the oracle cap and leaves it as ``None`` otherwise; ``True`` insists on it
    and raises :class:`OracleTooLargeError` above the cap; ``False`` skips it.
    """
    from .oracle import Objective, default_oracle_cap, oracle_optimal

    cap = default_oracle_cap() if oracle_cap is None else oracle_cap
    delta_a = _within_side_gap(profile.agent_utilities)
    delta_b = _within_side_gap(profile.arm_utilities)
    gamma_a = _cross_side_gap(profile.agent_utilities)
    gamma_b = _cross_side_gap(profile.arm_utilities)

    if with_delta is True and profile.n > cap:
        raise OracleTooLargeError(f"welfare gap needs the oracle, n={profile.n} exceeds cap {cap}")
    delta_welfare = None
    beta = None
    if with_delta is True or (with_delta is None and profile.n <= cap):
        _, best, second = oracle_optimal(profile, Objective.UTILITARIAN, oracle_cap=cap)
        delta_welfare = INF if second is None else best - second
        beta = min(delta_welfare / (4 * profile.n), delta_a / 2, delta_b / 2)

    return GapReport(
        delta_a=delta_a,
        delta_b=delta_b,
        gamma_a=gamma_a,
        gamma_b=gamma_b,
        gamma=min(gamma_a, gamma_b),
        delta_welfare=delta_welfare,
        beta=beta,
    )
