"""Independent replications of the learners and their aggregation.

Each replication owns its truth, environment, estimator and noise stream, so
replications can run in any order or in parallel.  Results are folded back in
replication order, which keeps the aggregate bit-for-bit reproducible.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from ..core import UtilityProfile, is_stable, maximin_welfare, utilitarian_welfare
from ..maximin import maximin_optimal
from ..opt import utilitarian_optimal
from ..oracle import Objective
from .environment import Environment
from .etc import SimulationTrace, run_epoch_etc
from .instances import random_instance
from .metrics import maximin_increments, stability_indicator_curve, utilitarian_increments
from .rng import INSTANCE_STREAM, derived_seed

Z95 = 1.96
TAIL_FRACTION = 0.1
WELFARE_TOL = 1e-9


@dataclass(frozen=True)
class ReplicationJob:
    """Everything one worker needs.

    With ``truth`` set every replication plays the same market; otherwise a
    fresh ``random_instance(n, ...)`` is drawn per replication.
    """

    objective: Objective
    horizon: int
    seed: int
    replication: int
    n: int | None = None
    truth: UtilityProfile | None = None
    stride: int = 1
    noise_scale: float = 1.0
    keep_trace: bool = False

    def instance(self) -> UtilityProfile:
        if self.truth is not None:
            return self.truth
        return random_instance(self.n, derived_seed(self.seed, self.replication, INSTANCE_STREAM))


@dataclass(frozen=True)
class ReplicationResult:
    replication: int
    final_correct: bool
    tail_regret: float  # mean per-step regret of the learner's own objective over the last 10% of steps
    first_increment: float  # that regret's increment at t = 1
    tail_stability: float
    times: np.ndarray  # recorded steps, 1-based
    epochs: np.ndarray
    explore: np.ndarray
    util_regret: np.ndarray  # cumulative, at the recorded steps
    maximin_regret: np.ndarray
    stable: np.ndarray
    trace: SimulationTrace | None = None


def tail_length(horizon: int) -> int:
    return max(1, math.ceil(TAIL_FRACTION * horizon))


def matches_optimum(truth: UtilityProfile, matching, objective: Objective) -> bool:
    """Whether ``matching`` is stable under ``truth`` with optimal welfare.

    Compared by value, since several stable matchings may share the optimum.
    """
    if matching is None or not is_stable(truth, matching).stable:
        return False
    if objective is Objective.UTILITARIAN:
        return abs(utilitarian_welfare(truth, matching) - utilitarian_welfare(truth, utilitarian_optimal(truth))) <= WELFARE_TOL
    return abs(maximin_welfare(truth, matching) - maximin_welfare(truth, maximin_optimal(truth))) <= WELFARE_TOL


def run_replication(job: ReplicationJob) -> ReplicationResult:
    truth = job.instance()
    env = Environment(truth, noise_scale=job.noise_scale, rng_seed=job.seed)
    trace = run_epoch_etc(env, job.objective, job.horizon, job.seed, replication=job.replication)
    util_inc = utilitarian_increments(trace, truth)
    mm_inc = maximin_increments(trace, truth)
    stable = stability_indicator_curve(trace, truth)
    own = util_inc if job.objective is Objective.UTILITARIAN else mm_inc
    tail = tail_length(job.horizon)
    idx = np.arange(job.stride - 1, job.horizon, job.stride)
    return ReplicationResult(
        replication=job.replication,
        final_correct=matches_optimum(truth, trace.final_matching, job.objective),
        tail_regret=float(own[-tail:].mean()),
        first_increment=float(own[0]),
        tail_stability=float(stable[-tail:].mean()),
        times=idx + 1,
        epochs=trace.epochs[idx],
        explore=trace.explore[idx],
        util_regret=np.cumsum(util_inc)[idx],
        maximin_regret=np.cumsum(mm_inc)[idx],
        stable=stable[idx].astype(float),
        trace=trace if job.keep_trace else None,
    )


@dataclass
class RunningMoments:
    """Welford mean and variance per time point."""

    count: int = 0
    mean: np.ndarray | None = None
    m2: np.ndarray | None = None

    def add(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        self.count += 1
        if self.mean is None:
            self.mean = x.copy()
            self.m2 = np.zeros_like(self.mean)
            return
        d = x - self.mean
        self.mean += d / self.count
        self.m2 += d * (x - self.mean)

    def half_width(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros_like(self.mean)
        sd = np.sqrt(self.m2 / (self.count - 1))
        return Z95 * sd / math.sqrt(self.count)


@dataclass
class BatchSummary:
    """Across-replication aggregates, in replication order."""

    objective: Objective
    horizon: int
    times: np.ndarray | None = None
    util_regret: RunningMoments = field(default_factory=RunningMoments)
    maximin_regret: RunningMoments = field(default_factory=RunningMoments)
    stable: RunningMoments = field(default_factory=RunningMoments)
    results: list[ReplicationResult] = field(default_factory=list)

    def add(self, res: ReplicationResult, keep_curves: bool = False) -> None:
        if self.times is None:
            self.times = res.times
        self.util_regret.add(res.util_regret)
        self.maximin_regret.add(res.maximin_regret)
        self.stable.add(res.stable)
        if not keep_curves:
            res = ReplicationResult(
                res.replication, res.final_correct, res.tail_regret, res.first_increment, res.tail_stability,
                res.times[:0], res.epochs[:0], res.explore[:0], res.util_regret[:0], res.maximin_regret[:0],
                res.stable[:0], res.trace,
            )
        self.results.append(res)

    @property
    def replications(self) -> int:
        return len(self.results)

    def correct_rate(self) -> float:
        return float(np.mean([r.final_correct for r in self.results]))

    def mean_tail_regret(self) -> float:
        return float(np.mean([r.tail_regret for r in self.results]))

    def mean_first_increment(self) -> float:
        return float(np.mean([r.first_increment for r in self.results]))

    def mean_tail_stability(self) -> float:
        return float(np.mean([r.tail_stability for r in self.results]))


def replication_jobs(objective: Objective | str, horizon: int, replications: int, seed: int, *,
                     n: int | None = None, truth: UtilityProfile | None = None, stride: int = 1,
                     noise_scale: float = 1.0, keep_traces: int = 0) -> list[ReplicationJob]:
    objective = Objective(objective)
    if (n is None) == (truth is None):
        raise ValueError("give exactly one of n and truth")
    if replications < 1:
        raise ValueError(f"replications must be at least 1, got {replications}")
    if stride < 1:
        raise ValueError(f"stride must be at least 1, got {stride}")
    return [
        ReplicationJob(objective, horizon, seed, r, n=n, truth=truth, stride=stride,
                       noise_scale=noise_scale, keep_trace=r < keep_traces)
        for r in range(replications)
    ]


def iter_results(jobs: Iterable[ReplicationJob], workers: int = 1) -> Iterator[ReplicationResult]:
    """Run replications, yielding results in job order whatever the worker count."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        yield from map(run_replication, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(run_replication, jobs, chunksize=max(1, len(jobs) // (4 * workers)))


def run_batch(objective: Objective | str, horizon: int, replications: int, seed: int, *,
              n: int | None = None, truth: UtilityProfile | None = None, stride: int = 1,
              noise_scale: float = 1.0, workers: int = 1, keep_traces: int = 0,
              keep_curves: bool = False) -> BatchSummary:
    jobs = replication_jobs(objective, horizon, replications, seed, n=n, truth=truth, stride=stride,
                            noise_scale=noise_scale, keep_traces=keep_traces)
    summary = BatchSummary(Objective(objective), horizon)
    for res in iter_results(jobs, workers):
        summary.add(res, keep_curves=keep_curves or res.trace is not None)
    return summary
