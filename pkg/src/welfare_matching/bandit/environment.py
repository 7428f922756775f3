"""Stochastic two-sided market and running sample means."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..core import UtilityProfile


@dataclass(frozen=True)
class Environment:
    """Hidden market.  Pulling arm ``j`` as agent ``i`` pays the agent
    ``mu_a[i, j] + noise`` and the arm ``mu_b[j, i] + noise``.

    ``noise_scale`` is the standard deviation of the Gaussian noise; ``0``
    turns the market deterministic.
    """

    truth: UtilityProfile
    noise_scale: float = 1.0
    rng_seed: int = 0

    @property
    def n(self) -> int:
        return self.truth.n


@dataclass(frozen=True)
class StepOutcome:
    """Rewards of one time step.

    ``arm_rewards[j]`` is 0 when arm ``j`` was not pulled or was contested;
    ``conflicted[i]`` marks agents that shared their arm with someone.
    """

    assignment: tuple[int, ...]
    agent_rewards: np.ndarray
    arm_rewards: np.ndarray
    conflicted: np.ndarray


def conflict_mask(assignment: Sequence[int], n: int) -> np.ndarray:
    arms = np.asarray(assignment)
    counts = np.bincount(arms, minlength=n)
    return counts[arms] > 1


def step(env: Environment, assignment: Sequence[int], rng: np.random.Generator) -> StepOutcome:
    """Draw rewards for one time step; contested arms pay everyone involved 0."""
    n = env.n
    arms = np.asarray(assignment, dtype=np.intp)
    if arms.shape != (n,) or np.any(arms < 0) or np.any(arms >= n):
        raise ValueError(f"assignment must give every one of the {n} agents an arm, got {list(assignment)}")
    conflicted = conflict_mask(arms, n)
    agents = np.arange(n)
    agent_noise = rng.standard_normal(n) * env.noise_scale
    arm_noise = rng.standard_normal(n) * env.noise_scale
    agent_rewards = env.truth.agent_utilities[agents, arms] + agent_noise
    agent_rewards[conflicted] = 0.0
    arm_rewards = np.zeros(n)
    ok = ~conflicted
    arm_rewards[arms[ok]] = env.truth.arm_utilities[arms[ok], agents[ok]] + arm_noise[arms[ok]]
    return StepOutcome(tuple(int(j) for j in arms), agent_rewards, arm_rewards, conflicted)


@dataclass
class Estimator:
    """Per-pair reward sums and counts for both directions."""

    n: int
    agent_sums: np.ndarray = field(init=False)
    agent_counts: np.ndarray = field(init=False)
    arm_sums: np.ndarray = field(init=False)
    arm_counts: np.ndarray = field(init=False)

    def __post_init__(self):
        self.agent_sums = np.zeros((self.n, self.n))
        self.agent_counts = np.zeros((self.n, self.n), dtype=np.int64)
        self.arm_sums = np.zeros((self.n, self.n))
        self.arm_counts = np.zeros((self.n, self.n), dtype=np.int64)

    def update(self, outcome: StepOutcome) -> None:
        """Record every uncontested pull of ``outcome``."""
        for i, j in enumerate(outcome.assignment):
            if outcome.conflicted[i]:
                continue
            self.agent_sums[i, j] += outcome.agent_rewards[i]
            self.agent_counts[i, j] += 1
            self.arm_sums[j, i] += outcome.arm_rewards[j]
            self.arm_counts[j, i] += 1

    def ready(self) -> bool:
        return bool(np.all(self.agent_counts > 0) and np.all(self.arm_counts > 0))

    def agent_means(self) -> np.ndarray:
        return np.where(self.agent_counts > 0, self.agent_sums / np.maximum(self.agent_counts, 1), np.nan)

    def arm_means(self) -> np.ndarray:
        return np.where(self.arm_counts > 0, self.arm_sums / np.maximum(self.arm_counts, 1), np.nan)

    def estimated_profile(self) -> UtilityProfile:
        """Sample means as a profile; ties are ranked by lower index."""
        if not self.ready():
            raise ValueError("every pair needs at least one sample before estimating")
        return UtilityProfile(self.agent_means(), self.arm_means())

    def digest(self) -> str:
        h = hashlib.sha256()
        for arr in (self.agent_sums, self.agent_counts, self.arm_sums, self.arm_counts):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]
