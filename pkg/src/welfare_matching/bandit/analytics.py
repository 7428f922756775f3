"""Closed-form sample sizes for one-shot explore-then-commit."""

from __future__ import annotations

import math

from ..errors import InvalidAlphaError, InvalidGapError
from ..oracle import Objective


def sample_complexity(n: int, gap: float, alpha: float, objective: Objective | str) -> int:
    """Total samples after which the solver is right with probability >= 1 - alpha.

    Utilitarian: ``2 n^2 / beta^2 * ln(4 n^2 / alpha)`` with ``gap = beta``.
    Maximin: ``8 n^2 / Gamma^2 * ln(4 n^2 / alpha)`` with ``gap = Gamma``.
    The logarithm is natural and the result is rounded to the nearest integer.
    """
    objective = Objective(objective)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not (gap > 0 and math.isfinite(gap)):
        raise InvalidGapError(f"gap must be a positive finite number, got {gap}")
    if not 0 < alpha < 1:
        raise InvalidAlphaError(f"alpha must lie in (0, 1), got {alpha}")
    factor = 2 if objective is Objective.UTILITARIAN else 8
    value = factor * n * n / (gap * gap) * math.log(4 * n * n / alpha)
    return math.floor(value + 0.5)
