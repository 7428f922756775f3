"""Regret and stability curves computed from true means."""

from __future__ import annotations

import numpy as np

from ..core import Matching, UtilityProfile, is_stable, utilitarian_welfare, maximin_welfare
from ..errors import TruthMismatchError
from ..maximin import maximin_optimal
from ..opt import utilitarian_optimal
from .etc import SimulationTrace, profile_digest


def _check(trace: SimulationTrace, truth: UtilityProfile) -> None:
    if trace.n != truth.n or trace.truth_digest != profile_digest(truth):
        raise TruthMismatchError("trace was not produced on this truth profile")


def realized_utilities(trace: SimulationTrace, truth: UtilityProfile) -> tuple[np.ndarray, np.ndarray]:
    """Expected utility of every agent and every arm at every step.

    Contested and unpulled participants get 0.
    """
    _check(trace, truth)
    T, n = trace.assignments.shape
    arms = trace.assignments
    agents = np.broadcast_to(np.arange(n), (T, n))
    ok = ~trace.conflicted
    agent_vals = np.where(ok, truth.agent_utilities[agents, arms], 0.0)
    arm_vals = np.zeros((T, n))
    rows = np.broadcast_to(np.arange(T)[:, None], (T, n))
    arm_vals[rows[ok], arms[ok]] = truth.arm_utilities[arms[ok], agents[ok]]
    return agent_vals, arm_vals


def utilitarian_increments(trace: SimulationTrace, truth: UtilityProfile,
                           optimum: Matching | None = None) -> np.ndarray:
    if optimum is None:
        optimum = utilitarian_optimal(truth)
    agent_vals, arm_vals = realized_utilities(trace, truth)
    best = utilitarian_welfare(truth, optimum)
    return best - (agent_vals.sum(axis=1) + arm_vals.sum(axis=1))


def utilitarian_regret_curve(trace: SimulationTrace, truth: UtilityProfile,
                             optimum: Matching | None = None) -> np.ndarray:
    """Cumulative shortfall of total matched utility against the best stable matching."""
    return np.cumsum(utilitarian_increments(trace, truth, optimum))


def maximin_increments(trace: SimulationTrace, truth: UtilityProfile,
                       optimum: Matching | None = None) -> np.ndarray:
    if optimum is None:
        optimum = maximin_optimal(truth)
    agent_vals, arm_vals = realized_utilities(trace, truth)
    floor = np.minimum(agent_vals.min(axis=1), arm_vals.min(axis=1))
    return maximin_welfare(truth, optimum) - floor


def maximin_regret_curve(trace: SimulationTrace, truth: UtilityProfile,
                         optimum: Matching | None = None) -> np.ndarray:
    """Cumulative shortfall of the worst-off participant against the maximin optimum."""
    return np.cumsum(maximin_increments(trace, truth, optimum))


def stability_indicator_curve(trace: SimulationTrace, truth: UtilityProfile) -> np.ndarray:
    """1 where the step's assignment is a conflict-free stable matching, else 0."""
    _check(trace, truth)
    out = np.zeros(trace.horizon, dtype=np.int8)
    rows, inverse = np.unique(trace.assignments, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    verdict = np.zeros(len(rows), dtype=np.int8)
    for k, row in enumerate(rows):
        if len(set(row.tolist())) == trace.n:
            verdict[k] = 1 if is_stable(truth, Matching(tuple(row.tolist()))).stable else 0
    out[:] = verdict[inverse]
    out[trace.conflicted.any(axis=1)] = 0
    return out
