"""Epoch schedule of the explore-then-commit learners."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Matching


def explore_samples(epoch: int) -> int:
    """Samples per (agent, arm) pair collected in ``epoch``: ceil(log2(epoch + 1))."""
    if epoch < 1:
        raise ValueError(f"epochs start at 1, got {epoch}")
    return epoch.bit_length()


@dataclass(frozen=True)
class EpochPlan:
    epoch: int
    explore_rounds: int
    exploit_rounds: int

    @classmethod
    def for_epoch(cls, epoch: int, n: int) -> EpochPlan:
        return cls(epoch=epoch, explore_rounds=n * explore_samples(epoch), exploit_rounds=2 ** epoch)

    @property
    def length(self) -> int:
        return self.explore_rounds + self.exploit_rounds


def cumulative_exploration_rounds(epoch: int) -> int:
    """Sum of ceil(log2(l + 1)) over l = 1..epoch, via the closed form.

    (l + 1) * ceil(log2(l + 1)) - 2 ** (floor(log2 l) + 1) + 1
    """
    if epoch < 1:
        raise ValueError(f"epochs start at 1, got {epoch}")
    bits = epoch.bit_length()  # ceil(log2(l+1)) == floor(log2 l) + 1
    return (epoch + 1) * bits - (1 << bits) + 1


def round_robin_assignment(t: int, n: int) -> Matching:
    """Exploration round ``t``: agent ``i`` pulls arm ``(t + i + 1) mod n``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return Matching(tuple((t + i + 1) % n for i in range(n)))
