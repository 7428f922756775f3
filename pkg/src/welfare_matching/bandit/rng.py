"""Reproducible random streams.

Every stream is a Philox counter-based generator keyed by a SeedSequence
built from ``(seed, *path)``.  Replication ``r`` of an experiment with base
seed ``s`` therefore draws from the same numbers no matter which worker runs
it or in which order replications finish.
"""

from __future__ import annotations

import numpy as np

# sub-stream labels under one replication
INSTANCE_STREAM = 0
NOISE_STREAM = 1


def substream(seed: int, *path: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))))


def derived_seed(seed: int, *path: int) -> int:
    """A 63-bit integer seed derived from ``(seed, *path)``."""
    state = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path)).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))
