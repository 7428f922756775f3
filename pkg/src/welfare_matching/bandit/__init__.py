"""Learning welfare-optimal stable matchings from noisy rewards."""

from .analytics import sample_complexity
from .batch import BatchSummary, ReplicationResult, run_batch, run_replication
from .environment import Environment, Estimator, StepOutcome, step
from .etc import EpochRecord, SimulationTrace, run_epoch_etc
from .instances import random_instance
from .metrics import maximin_regret_curve, stability_indicator_curve, utilitarian_regret_curve
from .schedule import EpochPlan, cumulative_exploration_rounds, round_robin_assignment

__all__ = [
    "BatchSummary",
    "Environment",
    "EpochPlan",
    "EpochRecord",
    "Estimator",
    "ReplicationResult",
    "SimulationTrace",
    "StepOutcome",
    "cumulative_exploration_rounds",
    "maximin_regret_curve",
    "random_instance",
    "round_robin_assignment",
    "run_batch",
    "run_epoch_etc",
    "run_replication",
    "sample_complexity",
    "stability_indicator_curve",
    "step",
    "utilitarian_regret_curve",
]
