"""Welfare-optimal stable matchings and bandit learners that find them.

Markets have ``n`` agents and ``n`` arms with strict cardinal utilities on
both sides.  Indices are 0-based everywhere.
"""

from .core import (
    GapReport,
    Matching,
    StabilityReport,
    UtilityProfile,
    blocking_pairs,
    is_stable,
    matched_utilities,
    maximin_welfare,
    preference_gaps,
    utilitarian_welfare,
    validate_profile,
)
from .da import Side, deferred_acceptance
from .maximin import maximin_optimal, side_maximin
from .opt import max_flow_min_cut, min_weight_closed_subset, utilitarian_optimal
from .oracle import Objective, enumerate_stable_matchings, oracle_optimal
from .rotations import break_matching, enumerate_rotations, rotation_digraph, sparse_predecessor_digraph

__version__ = "0.1.0"

__all__ = [
    "GapReport",
    "Matching",
    "Objective",
    "Side",
    "StabilityReport",
    "UtilityProfile",
    "blocking_pairs",
    "break_matching",
    "deferred_acceptance",
    "enumerate_rotations",
    "enumerate_stable_matchings",
    "is_stable",
    "matched_utilities",
    "max_flow_min_cut",
    "maximin_optimal",
    "maximin_welfare",
    "min_weight_closed_subset",
    "oracle_optimal",
    "preference_gaps",
    "rotation_digraph",
    "side_maximin",
    "sparse_predecessor_digraph",
    "utilitarian_optimal",
    "utilitarian_welfare",
    "validate_profile",
]
