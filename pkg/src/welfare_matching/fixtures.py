"""Small hand-made markets shipped with the package.

``cyclic_4x4``
    Four stable matchings arranged in a chain of three rotations.  The
    agent-optimal, maximin, utilitarian and arm-optimal matchings are all
    different.
``welfare_trap_2x2``
    Two stable matchings.  Its estimate keeps every agent's ranking but moves
    the utilitarian optimum to the other matching.
``crossed_2x2``
    A unique stable matching.  Under its estimate the utilitarian choice is
    unstable under the truth while the maximin choice stays stable.
``shared_top_2x2``
    Both agents rank ``b0`` first; a unique stable matching.  Under its
    estimate the maximin choice is unstable while the utilitarian one stays
    stable.

Estimates corrupt the agents' utilities only; arm rows equal the truth.
"""

from __future__ import annotations

from importlib import resources

from .core import Matching, UtilityProfile
from .io import parse_instance

NAMES = ("cyclic_4x4", "welfare_trap_2x2", "crossed_2x2", "shared_top_2x2")
WITH_ESTIMATE = ("welfare_trap_2x2", "crossed_2x2", "shared_top_2x2")

# named matchings, agent i -> arm pairs[i]
MATCHINGS: dict[str, dict[str, Matching]] = {
    "cyclic_4x4": {
        "agent_optimal": Matching((0, 1, 2, 3)),
        "maximin": Matching((1, 2, 3, 0)),
        "utilitarian": Matching((2, 3, 0, 1)),
        "arm_optimal": Matching((3, 0, 1, 2)),
    },
    "welfare_trap_2x2": {
        "agent_optimal": Matching((1, 0)),
        "utilitarian": Matching((0, 1)),
    },
    "crossed_2x2": {
        "stable": Matching((0, 1)),
        "swapped": Matching((1, 0)),
    },
    "shared_top_2x2": {
        "stable": Matching((0, 1)),
        "swapped": Matching((1, 0)),
    },
}


def fixture_path(name: str, estimate: bool = False):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    if estimate and name not in WITH_ESTIMATE:
        raise KeyError(f"fixture {name!r} has no estimate")
    fname = f"{name}_estimate.json" if estimate else f"{name}.json"
    return resources.files("welfare_matching").joinpath("data", fname)


def load(name: str, estimate: bool = False) -> UtilityProfile:
    return parse_instance(fixture_path(name, estimate).read_text(encoding="utf-8"))


def matching(name: str, label: str) -> Matching:
    return MATCHINGS[name][label]
