"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test records a one-line verdict; the lines are printed together at the
end of the pytest run (see ``conftest.py``) and when this file is executed
directly.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from welfare_matching import fixtures
from welfare_matching.bandit.analytics import sample_complexity
from welfare_matching.bandit.batch import run_batch
from welfare_matching.bandit.instances import random_instance
from welfare_matching.bandit.schedule import cumulative_exploration_rounds
from welfare_matching.core import UtilityProfile, is_stable, maximin_welfare, preference_gaps, utilitarian_welfare
from welfare_matching.da import Side, deferred_acceptance
from welfare_matching.maximin import maximin_optimal
from welfare_matching.opt import utilitarian_optimal
from welfare_matching.oracle import Objective, enumerate_stable_matchings, oracle_optimal
from welfare_matching.rotations import break_matching, reachable_matchings, rotation_digraph, rotation_weight

RESULTS: dict[int, tuple[bool, str]] = {}


def verdict(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = (bool(ok), detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def sweep_profiles():
    return [(seed, random_instance(3 + seed % 5, seed)) for seed in range(1, 501)]


def test_criterion_01_cyclic_market_exact():
    t0 = time.perf_counter()
    p = fixtures.load("cyclic_4x4")
    named = fixtures.MATCHINGS["cyclic_4x4"]
    m_u = utilitarian_optimal(p)
    m_mm = maximin_optimal(p)
    stable = enumerate_stable_matchings(p)
    checks = {
        "agent-proposing DA": deferred_acceptance(p, Side.AGENTS) == named["agent_optimal"],
        "arm-proposing DA": deferred_acceptance(p, Side.ARMS) == named["arm_optimal"],
        "utilitarian matching": m_u == named["utilitarian"],
        "utilitarian welfare 18.0": utilitarian_welfare(p, m_u) == 18.0,
        "maximin matching": m_mm == named["maximin"],
        "maximin value 1.7": maximin_welfare(p, m_mm) == 1.7,
        "stable set": set(stable.matchings) == set(named.values()) and len(stable) == 4,
    }
    elapsed = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    verdict(1, not failed and elapsed < 1.0, f"failed={failed or 'none'}, {elapsed:.3f}s (< 1 s)")


def test_criterion_02_welfare_trap():
    truth = fixtures.load("welfare_trap_2x2")
    estimate = fixtures.load("welfare_trap_2x2", estimate=True)
    chosen = utilitarian_optimal(estimate)
    picks_underlined = chosen == fixtures.matching("welfare_trap_2x2", "agent_optimal")
    flagged_unstable = not is_stable(truth, chosen).stable
    truth_choice = utilitarian_optimal(truth) == fixtures.matching("welfare_trap_2x2", "utilitarian")
    verdict(
        2,
        picks_underlined and flagged_unstable and truth_choice,
        f"estimate selects underlined: {picks_underlined}; is_stable flags it unstable under truth: "
        f"{flagged_unstable}; truth selects starred: {truth_choice}",
    )


def test_criterion_03_crossover():
    out = {}
    for name in ("crossed_2x2", "shared_top_2x2"):
        truth = fixtures.load(name)
        est = fixtures.load(name, estimate=True)
        out[name] = (is_stable(truth, maximin_optimal(est)).stable, is_stable(truth, utilitarian_optimal(est)).stable)
    ok = out["crossed_2x2"] == (True, False) and out["shared_top_2x2"] == (False, True)
    verdict(3, ok, f"(maximin stable, utilitarian stable) under truth: crossed={out['crossed_2x2']}, "
                   f"shared_top={out['shared_top_2x2']}")


def test_criterion_04_oracle_sweep():
    t0 = time.perf_counter()
    hits = 0
    misses = []
    for seed, p in sweep_profiles():
        _, best_u, _ = oracle_optimal(p, Objective.UTILITARIAN)
        _, best_mm, _ = oracle_optimal(p, Objective.MAXIMIN)
        m_u = utilitarian_optimal(p)
        m_mm = maximin_optimal(p)
        ok = (
            is_stable(p, m_u).stable
            and is_stable(p, m_mm).stable
            and utilitarian_welfare(p, m_u) == best_u
            and maximin_welfare(p, m_mm) == best_mm
        )
        hits += ok
        if not ok:
            misses.append(seed)
    elapsed = time.perf_counter() - t0
    verdict(4, hits == 500 and elapsed < 60, f"{hits}/500 exact, misses={misses[:10]}, {elapsed:.1f}s (< 60 s)")


def test_criterion_05_rotation_machinery():
    worst = 0.0
    steps = 0
    compared = 0
    mismatched = []
    for seed, p in sweep_profiles():
        m_b = deferred_acceptance(p, Side.ARMS)
        m = deferred_acceptance(p, Side.AGENTS)
        while m != m_b:
            agent = next(i for i in range(p.n) if m.arm_of(i) != m_b.arm_of(i))
            rot, nxt = break_matching(p, m, agent, arm_optimal=m_b)
            err = abs(utilitarian_welfare(p, nxt) - (utilitarian_welfare(p, m) - rotation_weight(p, rot)))
            worst = max(worst, err)
            steps += 1
            m = nxt
        g = rotation_digraph(p)
        if len(g) <= 12:
            compared += 1
            if reachable_matchings(g) != set(enumerate_stable_matchings(p).matchings):
                mismatched.append(seed)
    ok = worst <= 1e-9 and not mismatched
    verdict(5, ok, f"(a) {steps} break steps, max |R(m')-R(m)+w| = {worst:.2e} (<= 1e-9); "
                   f"(b) {compared} digraphs compared, mismatches={mismatched[:10]}")


def test_criterion_06_schedule_identity():
    t0 = time.perf_counter()
    total = 0
    bad = []
    for l in range(1, 100_001):
        total += math.ceil(math.log2(l + 1))
        if cumulative_exploration_rounds(l) != total:
            bad.append(l)
    elapsed = time.perf_counter() - t0
    verdict(6, not bad and elapsed < 1.0, f"mismatches={bad[:5]}, {elapsed:.3f}s (< 1 s)")


def _perturbed(p: UtilityProfile, bound: float, rng) -> UtilityProfile:
    while True:
        da = rng.uniform(-bound, bound, p.agent_utilities.shape)
        db = rng.uniform(-bound, bound, p.arm_utilities.shape)
        if np.abs(da).max() < bound and np.abs(db).max() < bound:
            return UtilityProfile(p.agent_utilities + da, p.arm_utilities + db)


def test_criterion_07_perturbation_robustness():
    rng = np.random.default_rng(7)
    draws = 5
    util_fail = mm_fail = 0
    pool = []
    seed = 0
    while len(pool) < 200:
        seed += 1
        p = random_instance(3 + seed % 4, seed)
        g = preference_gaps(p, with_delta=True)
        if g.beta > 0:
            pool.append((p, g))
    for p, g in pool:
        want_u = utilitarian_optimal(p)
        want_mm = maximin_welfare(p, maximin_optimal(p))
        for _ in range(draws):
            if utilitarian_optimal(_perturbed(p, g.beta, rng)) != want_u:
                util_fail += 1
            if maximin_welfare(p, maximin_optimal(_perturbed(p, g.gamma / 2, rng))) != want_mm:
                mm_fail += 1
    verdict(7, util_fail == 0 and mm_fail == 0,
            f"{len(pool)} instances x {draws} draws: utilitarian failures={util_fail}, maximin failures={mm_fail}")


@pytest.mark.parametrize("objective", [Objective.UTILITARIAN, Objective.MAXIMIN])
def test_criterion_08_regret_convergence(objective):
    t0 = time.perf_counter()
    s = run_batch(objective, 2**16, 200, 2024, n=5, workers=os.cpu_count() or 1)
    elapsed = time.perf_counter() - t0
    tail, first = s.mean_tail_regret(), s.mean_first_increment()
    correct, stable = s.correct_rate(), s.mean_tail_stability()
    ok = tail <= 0.02 * first and correct >= 0.95 and stable >= 0.95 and elapsed < 600
    RESULTS.setdefault(8, (True, ""))
    line = (f"{objective.value}: tail regret {tail:.4g} vs 2% of {first:.4g}, optimal {correct:.3f} (>= 0.95), "
            f"tail stability {stable:.3f} (>= 0.95), {elapsed:.0f}s")
    prev_ok, prev = RESULTS[8]
    RESULTS[8] = (prev_ok and ok, f"{prev}; {line}" if prev else line)
    print(f"criterion 8 [{objective.value}]: {'PASS' if ok else 'FAIL'} - {line}")
    assert ok, line


def test_criterion_09_sample_complexity():
    u = sample_complexity(4, 0.0625, 0.05, Objective.UTILITARIAN)
    m = sample_complexity(4, 0.1, 0.05, Objective.MAXIMIN)
    verdict(9, (u, m) == (58611, 91579), f"utilitarian={u} (58611), maximin={m} (91579)")


def test_criterion_10_determinism(tmp_path):
    args = ["simulate", "--n", "5", "--seed", "11", "--algo", "utilitarian-etc", "--horizon", "4096",
            "--replications", "4", "--traces", "4"]
    for sub in ("a", "b"):
        subprocess.run([sys.executable, "-m", "welfare_matching", *args, "--out", str(tmp_path / sub)],
                       check=True, capture_output=True)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names)
    verdict(10, same and len(names) == 6, f"{len(names)} CSV files compared, byte-identical: {same}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
