"""Brute-force enumeration of stable matchings for small markets.

This is the ground truth the polynomial algorithms are checked against.  It
tries every perfect matching, pruning a partial assignment as soon as two
already-placed pairs form a blocking pair.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

from .core import Matching, UtilityProfile, maximin_welfare, utilitarian_welfare
from .errors import OracleTooLargeError

ORACLE_CAP_ENV = "WELFARE_MATCHING_ORACLE_CAP"
DEFAULT_ORACLE_CAP = 8


class Objective(str, enum.Enum):
    UTILITARIAN = "utilitarian"
    MAXIMIN = "maximin"


def default_oracle_cap() -> int:
    raw = os.environ.get(ORACLE_CAP_ENV)
    return int(raw) if raw else DEFAULT_ORACLE_CAP


@dataclass(frozen=True)
class StableEntry:
    matching: Matching
    utilitarian: float
    maximin: float


@dataclass(frozen=True)
class StableSet:
    entries: tuple[StableEntry, ...]

    @property
    def matchings(self) -> list[Matching]:
        return [e.matching for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, matching: Matching) -> bool:
        return any(e.matching == matching for e in self.entries)


def _stable_permutations(profile: UtilityProfile) -> list[tuple[int, ...]]:
    n = profile.n
    arank = profile.agent_rank
    brank = profile.arm_rank
    assignment = [-1] * n
    holder = [-1] * n
    found = []

    def place(i: int) -> None:
        if i == n:
            found.append(tuple(assignment))
            return
        for j in range(n):
            if holder[j] != -1:
                continue
            ok = True
            for k in range(i):
                jk = assignment[k]
                # agent i with an earlier agent's arm
                if arank[i][jk] < arank[i][j] and brank[jk][i] < brank[jk][k]:
                    ok = False
                    break
                # an earlier agent with arm j
                if arank[k][j] < arank[k][jk] and brank[j][k] < brank[j][i]:
                    ok = False
                    break
            if not ok:
                continue
            assignment[i] = j
            holder[j] = i
            place(i + 1)
            assignment[i] = -1
            holder[j] = -1

    place(0)
    return found


def enumerate_stable_matchings(profile: UtilityProfile, *, oracle_cap: int | None = None) -> StableSet:
    """All stable matchings of ``profile``, in lexicographic order of ``pairs``."""
    cap = default_oracle_cap() if oracle_cap is None else oracle_cap
    if profile.n > cap:
        raise OracleTooLargeError(f"oracle enumeration is capped at n={cap}, got n={profile.n}")
    entries = []
    for pairs in _stable_permutations(profile):
        m = Matching(pairs)
        entries.append(StableEntry(m, utilitarian_welfare(profile, m), maximin_welfare(profile, m)))
    return StableSet(tuple(entries))


def oracle_optimal(profile: UtilityProfile, objective: Objective | str, *,
                   oracle_cap: int | None = None) -> tuple[Matching, float, float | None]:
    """Best stable matching for ``objective`` with its value and the runner-up value.

    The runner-up is the best value among the *other* stable matchings, so it
    equals the optimum when two matchings tie; it is ``None`` when the stable
    matching is unique.  Ties for the optimum go to the first matching in
    enumeration order.
    """
    objective = Objective(objective)
    stable = enumerate_stable_matchings(profile, oracle_cap=oracle_cap)
    key = (lambda e: e.utilitarian) if objective is Objective.UTILITARIAN else (lambda e: e.maximin)
    best = max(stable.entries, key=key)
    rest = [key(e) for e in stable.entries if e is not best]
    return best.matching, key(best), (max(rest) if rest else None)
