from __future__ import annotations

import numpy as np

from ..core import UtilityProfile, validate_profile
from .rng import substream


def random_instance(n: int, seed: int) -> UtilityProfile:
    """Market whose every preference row is a uniform random permutation of 1..n.

    Agent rows are drawn first, then arm rows, all from one Philox stream.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = substream(seed)
    agent = np.array([rng.permutation(n) + 1 for _ in range(n)], dtype=float)
    arm = np.array([rng.permutation(n) + 1 for _ in range(n)], dtype=float)
    return validate_profile(agent, arm)
