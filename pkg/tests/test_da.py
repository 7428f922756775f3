import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import reference as ref
from welfare_matching import fixtures
from welfare_matching.core import is_stable, validate_profile
from welfare_matching.da import Side, deferred_acceptance
from welfare_matching.oracle import enumerate_stable_matchings


def test_cyclic_extremes(cyclic):
    assert deferred_acceptance(cyclic) == fixtures.matching("cyclic_4x4", "agent_optimal")
    assert deferred_acceptance(cyclic, Side.ARMS) == fixtures.matching("cyclic_4x4", "arm_optimal")
    assert deferred_acceptance(cyclic, "arms") == deferred_acceptance(cyclic, Side.ARMS)


def test_side_other():
    assert Side.AGENTS.other() is Side.ARMS and Side.ARMS.other() is Side.AGENTS


def test_single_pair():
    p = validate_profile([[1.0]], [[2.0]])
    assert deferred_acceptance(p).pairs == (0,)


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_matches_textbook_and_is_side_optimal(n, seed):
    a, b = ref.random_profile(np.random.default_rng(seed), n)
    p = validate_profile(a, b)
    m_a = deferred_acceptance(p, Side.AGENTS)
    m_b = deferred_acceptance(p, Side.ARMS)
    assert m_a.pairs == ref.gale_shapley(a.tolist(), b.tolist())
    # arm-proposing result expressed agent -> arm
    arm_side = ref.gale_shapley(b.tolist(), a.tolist())
    assert m_b.inverse == arm_side
    assert is_stable(p, m_a) and is_stable(p, m_b)
    for m in enumerate_stable_matchings(p).matchings:
        for i in range(n):
            assert a[i, m_a.arm_of(i)] >= a[i, m.arm_of(i)] >= a[i, m_b.arm_of(i)]
