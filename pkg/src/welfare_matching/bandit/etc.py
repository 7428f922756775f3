"""Epoch explore-then-commit learners for utilitarian and maximin welfare.

Epoch ``l`` explores round-robin for ``n * ceil(log2(l + 1))`` rounds, solves
the welfare problem on the cumulative sample means and plays the resulting
matching for ``2 ** l`` rounds.  Runs are cut off exactly at the horizon.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import Matching, UtilityProfile
from ..errors import HorizonTooSmallError
from ..maximin import maximin_optimal
from ..opt import utilitarian_optimal
from ..oracle import Objective
from .environment import Environment, Estimator, step
from .rng import NOISE_STREAM, substream
from .schedule import EpochPlan, round_robin_assignment

EXPLORE = "explore"
EXPLOIT = "exploit"

SOLVERS: dict[Objective, Callable[[UtilityProfile], Matching]] = {
    Objective.UTILITARIAN: utilitarian_optimal,
    Objective.MAXIMIN: maximin_optimal,
}


def profile_digest(profile: UtilityProfile) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(profile.agent_utilities).tobytes())
    h.update(np.ascontiguousarray(profile.arm_utilities).tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    start: int  # first time step of the epoch (1-based)
    explore_rounds: int  # rounds actually played, may be cut by the horizon
    exploit_rounds: int
    committed: Matching | None
    estimator_digest: str | None


@dataclass(frozen=True)
class SimulationTrace:
    """Everything a run did, one row per time step ``t = 1..horizon``.

    ``assignments[t - 1, i]`` is the arm agent ``i`` pulled at time ``t``.
    """

    horizon: int
    n: int
    objective: Objective
    epochs: np.ndarray
    explore: np.ndarray
    assignments: np.ndarray
    conflicted: np.ndarray
    epoch_records: tuple[EpochRecord, ...]
    truth_digest: str

    @property
    def times(self) -> np.ndarray:
        return np.arange(1, self.horizon + 1)

    def phases(self) -> list[str]:
        return [EXPLORE if e else EXPLOIT for e in self.explore]

    @property
    def final_matching(self) -> Matching | None:
        for record in reversed(self.epoch_records):
            if record.committed is not None:
                return record.committed
        return None


def run_epoch_etc(env: Environment, objective: Objective | str, horizon: int, seed: int | None = None,
                  *, replication: int = 0) -> SimulationTrace:
    """Simulate one learner for ``horizon`` steps.

    Noise is drawn from the stream ``(seed, replication, NOISE_STREAM)``;
    ``seed`` defaults to ``env.rng_seed``.
    """
    objective = Objective(objective)
    n = env.n
    if horizon < n:
        raise HorizonTooSmallError(f"horizon {horizon} is shorter than one exploration round of {n} steps")
    rng = substream(env.rng_seed if seed is None else seed, replication, NOISE_STREAM)
    solve = SOLVERS[objective]

    epochs = np.zeros(horizon, dtype=np.int32)
    explore = np.zeros(horizon, dtype=bool)
    assignments = np.zeros((horizon, n), dtype=np.int32)
    conflicted = np.zeros((horizon, n), dtype=bool)
    estimator = Estimator(n)
    records = []

    t = 0  # steps played so far
    epoch = 0
    while t < horizon:
        epoch += 1
        plan = EpochPlan.for_epoch(epoch, n)
        start = t + 1
        explored = 0
        for _ in range(plan.explore_rounds):
            if t >= horizon:
                break
            m = round_robin_assignment(t + 1, n)
            outcome = step(env, m.pairs, rng)
            estimator.update(outcome)
            epochs[t] = epoch
            explore[t] = True
            assignments[t] = m.pairs
            conflicted[t] = outcome.conflicted
            t += 1
            explored += 1
        if explored < plan.explore_rounds:
            records.append(EpochRecord(epoch, start, explored, 0, None, None))
            break
        committed = solve(estimator.estimated_profile())
        exploit = min(plan.exploit_rounds, horizon - t)
        # exploitation samples never feed the estimates, so rewards are not drawn
        epochs[t:t + exploit] = epoch
        assignments[t:t + exploit] = committed.pairs
        t += exploit
        records.append(EpochRecord(epoch, start, explored, exploit, committed, estimator.digest()))

    return SimulationTrace(
        horizon=horizon,
        n=n,
        objective=objective,
        epochs=epochs,
        explore=explore,
        assignments=assignments,
        conflicted=conflicted,
        epoch_records=tuple(records),
        truth_digest=profile_digest(env.truth),
    )
