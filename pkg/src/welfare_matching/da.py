"""Deferred acceptance with either side proposing."""

from __future__ import annotations

import enum

from .core import Matching, UtilityProfile


class Side(str, enum.Enum):
    AGENTS = "agents"
    ARMS = "arms"

    def other(self) -> Side:
        return Side.ARMS if self is Side.AGENTS else Side.AGENTS


def _propose(prefs, receiver_rank) -> list[int]:
    """Proposer-optimal matching; returns ``partner[proposer]``."""
    n = len(prefs)
    next_choice = [0] * n
    held_by = [-1] * n  # receiver -> proposer currently held
    free = list(range(n))
    while free:
        # ascending index order inside each round
        free.sort()
        still_free = []
        for p in free:
            r = prefs[p][next_choice[p]]
            next_choice[p] += 1
            current = held_by[r]
            if current == -1:
                held_by[r] = p
            elif receiver_rank[r][p] < receiver_rank[r][current]:
                held_by[r] = p
                still_free.append(current)
            else:
                still_free.append(p)
        free = still_free
    partner = [-1] * n
    for r, p in enumerate(held_by):
        partner[p] = r
    return partner


def deferred_acceptance(profile: UtilityProfile, proposing: Side | str = Side.AGENTS) -> Matching:
    """Gale-Shapley deferred acceptance.

    With ``proposing=Side.AGENTS`` the result is the agent-optimal stable
    matching; with ``Side.ARMS`` it is the arm-optimal one.
    """
    proposing = Side(proposing)
    if proposing is Side.AGENTS:
        return Matching(tuple(_propose(profile.agent_prefs, profile.arm_rank)))
    arm_partner = _propose(profile.arm_prefs, profile.agent_rank)
    pairs = [0] * profile.n
    for j, i in enumerate(arm_partner):
        pairs[i] = j
    return Matching(tuple(pairs))
