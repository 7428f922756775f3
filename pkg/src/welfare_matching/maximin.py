"""Maximin (Rawlsian) stable matchings.

The arm-side procedure starts at the agent-optimal matching and keeps
breaking the pair of the worst-off arm, which moves that arm up while
everyone on the agent side drifts down.  It stops when the worst-off arm is
already with its arm-optimal partner, or when a break leaves no arm at the
minimum.  The agent-side procedure is the same walk on the role-swapped
market.
"""

from __future__ import annotations

from .core import Matching, UtilityProfile, matched_utilities
from .da import Side, deferred_acceptance
from .errors import InternalInvariantBrokenError
from .rotations import break_marriage


def _arm_side(profile: UtilityProfile) -> tuple[Matching, int]:
    m_b = deferred_acceptance(profile, Side.ARMS)
    m = deferred_acceptance(profile, Side.AGENTS)
    steps = 0
    while True:
        agent_vals, arm_vals = matched_utilities(profile, m)
        floor = min(min(agent_vals), min(arm_vals))
        worst_arms = [j for j, v in enumerate(arm_vals) if v == floor]
        if not worst_arms:
            # only agents sit at the floor; moving down can only lower it
            return m, steps
        b = worst_arms[0]
        a = m.agent_of(b)
        if m_b.arm_of(a) == b:
            return m, steps
        nxt = break_marriage(profile, m, a, arm_optimal=m_b)
        steps += 1
        if steps > profile.n * profile.n:
            raise InternalInvariantBrokenError("maximin walk did not terminate")
        agent_vals, arm_vals = matched_utilities(profile, nxt)
        floor = min(min(agent_vals), min(arm_vals))
        if floor not in arm_vals:
            return m, steps
        m = nxt


def side_maximin(profile: UtilityProfile, side: Side | str = Side.ARMS) -> Matching:
    """Best stable matching among those whose worst-off member is on ``side``.

    When no stable matching has its minimum on ``side`` the starting matching
    of the walk is returned.
    """
    side = Side(side)
    if side is Side.ARMS:
        return _arm_side(profile)[0]
    swapped, _ = _arm_side(profile.swapped())
    # swapped.pairs maps old arms to old agents
    return Matching(swapped.inverse)


def side_maximin_steps(profile: UtilityProfile, side: Side | str = Side.ARMS) -> int:
    """Number of break operations the side walk performs."""
    side = Side(side)
    return _arm_side(profile if side is Side.ARMS else profile.swapped())[1]


def maximin_optimal(profile: UtilityProfile) -> Matching:
    """Stable matching maximizing the minimum matched utility; ties go to the arm side."""
    arm_result = side_maximin(profile, Side.ARMS)
    agent_result = side_maximin(profile, Side.AGENTS)
    arm_floor = min(min(v) for v in matched_utilities(profile, arm_result))
    agent_floor = min(min(v) for v in matched_utilities(profile, agent_result))
    return agent_result if agent_floor > arm_floor else arm_result
