"""Instance files, experiment configuration and CSV export.

Instances are JSON documents::

    {"n": 2,
     "agent_utilities": [[0.4, 1.1], [1.2, 0.6]],
     "arm_utilities": [[1.6, 0.6], [0.4, 1.4]]}

Row ``i`` of ``agent_utilities`` is agent ``i`` over arms, row ``j`` of
``arm_utilities`` is arm ``j`` over agents.  Floats are written with ``repr``
so a write/read round trip is bit-exact.
"""

from __future__ import annotations

import csv
import json
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import UtilityProfile, validate_profile
from .errors import ParseError

UTILITY_FIELDS = ("agent_utilities", "arm_utilities")
TRACE_HEADER = ("time", "epoch", "phase", "util_regret", "maximin_regret", "stable")
SUMMARY_HEADER = (
    "time",
    "util_regret_mean", "util_regret_lo", "util_regret_hi",
    "maximin_regret_mean", "maximin_regret_lo", "maximin_regret_hi",
    "stable_mean", "stable_lo", "stable_hi",
)
REPLICATION_HEADER = ("replication", "final_correct", "tail_regret", "first_increment", "tail_stability")
ALGORITHMS = {"utilitarian-etc": "utilitarian", "maximin-etc": "maximin"}


def _line_of(text: str, key: str) -> int | None:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _number(value, field: str, line: int | None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{field} must hold numbers, found {value!r}", line=line, field=field)
    return float(value)


def parse_instance(text: str) -> UtilityProfile:
    """Parse and validate an instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", line=1)
    for key in ("n",) + UTILITY_FIELDS:
        if key not in doc:
            raise ParseError(f"missing field {key!r}", field=key)
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"n must be a positive integer, found {n!r}", line=_line_of(text, "n"), field="n")
    mats = []
    for key in UTILITY_FIELDS:
        line = _line_of(text, key)
        rows = doc[key]
        if not isinstance(rows, list) or len(rows) != n:
            got = len(rows) if isinstance(rows, list) else type(rows).__name__
            raise ParseError(f"{key} needs {n} rows, found {got}", line=line, field=key)
        mat = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise ParseError(f"{key}[{i}] needs {n} entries", line=line, field=f"{key}[{i}]")
            mat.append([_number(v, f"{key}[{i}]", line) for v in row])
        mats.append(np.array(mat, dtype=float))
    return validate_profile(*mats)


def read_instance(path: str | os.PathLike) -> UtilityProfile:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def dump_instance(profile: UtilityProfile) -> str:
    def rows(mat):
        return ",\n".join("    [" + ", ".join(repr(float(v)) for v in row) + "]" for row in mat)

    return (
        "{\n"
        f'  "n": {profile.n},\n'
        f'  "agent_utilities": [\n{rows(profile.agent_utilities)}\n  ],\n'
        f'  "arm_utilities": [\n{rows(profile.arm_utilities)}\n  ]\n'
        "}\n"
    )


def write_instance(profile: UtilityProfile, path: str | os.PathLike) -> None:
    Path(path).write_text(dump_instance(profile), encoding="utf-8")


@dataclass(frozen=True)
class ExperimentConfig:
    """One ``simulate`` invocation.

    Either ``instance`` (a file) or ``n`` (fresh random markets per
    replication, seeded from ``seed``) names the truth.
    """

    algorithm: str
    horizon: int
    replications: int = 1
    seed: int = 0
    instance: str | None = None
    n: int | None = None
    out: str | None = None
    stride: int = 1
    workers: int = 1
    traces: int = 1
    noise_scale: float = 1.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {sorted(ALGORITHMS)}, got {self.algorithm!r}")
        if (self.instance is None) == (self.n is None):
            raise ValueError("give exactly one of an instance file and n")
        if self.n is not None and self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.replications < 1:
            raise ValueError(f"replications must be at least 1, got {self.replications}")
        if self.stride < 1:
            raise ValueError(f"stride must be at least 1, got {self.stride}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.traces < 0:
            raise ValueError(f"traces must be non-negative, got {self.traces}")
        if not (self.noise_scale >= 0 and math.isfinite(self.noise_scale)):
            raise ValueError(f"noise scale must be a finite non-negative number, got {self.noise_scale}")
        if self.n is not None:
            self.check_horizon(self.n)

    @property
    def objective(self) -> str:
        return ALGORITHMS[self.algorithm]

    def check_horizon(self, n: int) -> None:
        if self.horizon < n:
            raise ValueError(f"horizon {self.horizon} must be at least n = {n}")


def _fmt(x) -> str:
    """Shortest round-tripping decimal; independent of the process locale."""
    return repr(float(x))


def _write_rows(path: str | os.PathLike, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_trace_csv(path: str | os.PathLike, result) -> int:
    """Write one replication's recorded steps; returns the number of data rows.

    ``result`` is a :class:`~welfare_matching.bandit.batch.ReplicationResult`
    whose curves are already thinned to the configured stride.
    """
    rows = [
        (int(t), int(e), "explore" if x else "exploit", _fmt(u), _fmt(m), int(s))
        for t, e, x, u, m, s in zip(result.times, result.epochs, result.explore,
                                    result.util_regret, result.maximin_regret, result.stable)
    ]
    _write_rows(path, TRACE_HEADER, rows)
    return len(rows)


def write_summary_csv(path: str | os.PathLike, summary) -> int:
    """Per-time mean and 95% interval across replications."""
    cols = [summary.times]
    for moments in (summary.util_regret, summary.maximin_regret, summary.stable):
        hw = moments.half_width()
        cols += [moments.mean, moments.mean - hw, moments.mean + hw]
    rows = [[int(r[0])] + [_fmt(v) for v in r[1:]] for r in zip(*cols)]
    _write_rows(path, SUMMARY_HEADER, rows)
    return len(rows)


def write_replications_csv(path: str | os.PathLike, summary) -> int:
    rows = [
        (r.replication, int(r.final_correct), _fmt(r.tail_regret), _fmt(r.first_increment), _fmt(r.tail_stability))
        for r in summary.results
    ]
    _write_rows(path, REPLICATION_HEADER, rows)
    return len(rows)
