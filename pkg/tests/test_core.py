import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import reference as ref
from welfare_matching import fixtures
from welfare_matching.core import (
    Matching,
    UtilityProfile,
    blocking_pairs,
    is_stable,
    matched_utilities,
    maximin_welfare,
    preference_gaps,
    utilitarian_welfare,
    validate_profile,
)
from welfare_matching.errors import (
    DimensionMismatchError,
    NegativeUtilityError,
    NonFiniteError,
    OracleTooLargeError,
    ProfileError,
    TiedUtilitiesError,
)


def perm_profiles(max_n=6):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        rows = st.permutations(list(range(1, n + 1)))
        agent = [draw(rows) for _ in range(n)]
        arm = [draw(rows) for _ in range(n)]
        return validate_profile(agent, arm)

    return build()


class TestValidation:
    def test_accepts_fixture(self, cyclic):
        assert cyclic.n == 4

    @pytest.mark.parametrize(
        "agent, arm, exc",
        [
            ([[1, 2], [2, 1]], [[1, 2, 3], [1, 2, 3], [1, 2, 3]], DimensionMismatchError),
            ([[1, 2, 3], [2, 1, 3]], [[1, 2], [2, 1]], DimensionMismatchError),
            ([[1, 2], [2, 1]], [[1, -2], [2, 1]], NegativeUtilityError),
            ([[1, 1], [2, 1]], [[1, 2], [2, 1]], TiedUtilitiesError),
            ([[1, np.nan], [2, 1]], [[1, 2], [2, 1]], NonFiniteError),
            ([[1, np.inf], [2, 1]], [[1, 2], [2, 1]], NonFiniteError),
            ([[1, 2], [2]], [[1, 2], [2, 1]], DimensionMismatchError),
        ],
    )
    def test_rejects(self, agent, arm, exc):
        with pytest.raises(exc):
            validate_profile(agent, arm)

    def test_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            validate_profile([[1, 1], [1, 2]], [[1, 2], [2, 1]])
        assert issubclass(TiedUtilitiesError, ProfileError)

    def test_zero_is_allowed(self):
        assert validate_profile([[0.0]], [[0.0]]).n == 1

    def test_profile_is_read_only(self, cyclic):
        with pytest.raises(ValueError):
            cyclic.agent_utilities[0, 0] = 9

    def test_estimated_profile_with_ties_ranks_lower_index_first(self):
        p = UtilityProfile([[1.0, 1.0], [0.5, 0.5]], [[2.0, 2.0], [1.0, 3.0]])
        assert p.agent_prefs[0] == (0, 1)
        assert p.arm_prefs[0] == (0, 1)
        assert p.arm_prefs[1] == (1, 0)


class TestMatching:
    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            Matching((0, 0, 1))

    def test_inverse_and_format(self):
        m = Matching((2, 0, 1))
        assert m.inverse == (1, 2, 0)
        assert m.agent_of(2) == 0
        assert m.format_lines() == ["a0 -> b2", "a1 -> b0", "a2 -> b1"]
        assert Matching.from_agent_pairs([(1, 0), (0, 2), (2, 1)]) == m

    def test_dimension_check(self, cyclic):
        with pytest.raises(DimensionMismatchError):
            is_stable(cyclic, Matching((0, 1)))


class TestStability:
    def test_cyclic_stable_set(self, cyclic):
        for label in ("agent_optimal", "maximin", "utilitarian", "arm_optimal"):
            assert is_stable(cyclic, fixtures.matching("cyclic_4x4", label))

    def test_blocking_pair_reported(self):
        p = fixtures.load("crossed_2x2")
        rep = is_stable(p, Matching((1, 0)))
        assert not rep.stable
        # a1 prefers b1 to b0 and b1 prefers a1, so (1, 1) blocks
        assert (1, 1) in rep.blocking_pairs

    def test_trap_underlined_matching_is_stable(self):
        # both agents hold their first choice, so nothing can block
        p = fixtures.load("welfare_trap_2x2")
        assert is_stable(p, fixtures.matching("welfare_trap_2x2", "agent_optimal")).stable

    @settings(max_examples=150, deadline=None)
    @given(perm_profiles(), st.randoms(use_true_random=False))
    def test_blocking_pairs_match_reference(self, p, rnd):
        perm = list(range(p.n))
        rnd.shuffle(perm)
        got = blocking_pairs(p, Matching(tuple(perm)))
        assert got == sorted(ref.blocking(p.agent_utilities.tolist(), p.arm_utilities.tolist(), perm))


class TestWelfare:
    @pytest.mark.parametrize(
        "label, util, floor",
        [("agent_optimal", 16.0, 0.5), ("maximin", 17.0, 1.7), ("utilitarian", 18.0, 1.5), ("arm_optimal", 16.0, 0.5)],
    )
    def test_cyclic_values(self, cyclic, label, util, floor):
        m = fixtures.matching("cyclic_4x4", label)
        assert utilitarian_welfare(cyclic, m) == util
        assert maximin_welfare(cyclic, m) == floor

    def test_matched_utilities(self, cyclic):
        agents, arms = matched_utilities(cyclic, fixtures.matching("cyclic_4x4", "maximin"))
        assert agents == [2.5] * 4
        assert arms == [1.8, 1.7, 1.8, 1.7]

    @settings(max_examples=100, deadline=None)
    @given(perm_profiles())
    def test_relabelling_preserves_welfare(self, p):
        n = p.n
        ap = np.roll(np.arange(n), 1)
        bp = np.arange(n)[::-1]
        q = p.permuted(ap, bp)
        m = Matching(tuple(range(n)))
        # agent k of q is old agent ap[k], arm k of q is old arm bp[k]
        old = Matching.from_agent_pairs((int(ap[k]), int(bp[m.arm_of(k)])) for k in range(n))
        assert utilitarian_welfare(q, m) == pytest.approx(utilitarian_welfare(p, old))
        assert is_stable(q, m).stable == is_stable(p, old).stable


class TestGaps:
    def test_cyclic_gaps(self, cyclic):
        g = preference_gaps(cyclic)
        assert g.delta_a == 1.0
        assert g.delta_b == 0.5
        assert g.gamma_a == 1.0
        assert g.gamma_b == pytest.approx(0.1, abs=1e-12)
        assert g.gamma == pytest.approx(0.1, abs=1e-12)
        assert g.delta_welfare == 1.0
        assert g.beta == 0.0625

    def test_unique_stable_matching_gives_infinite_welfare_gap(self):
        g = preference_gaps(fixtures.load("shared_top_2x2"))
        assert math.isinf(g.delta_welfare)
        assert g.beta == min(g.delta_a, g.delta_b) / 2

    def test_above_cap(self, cyclic):
        g = preference_gaps(cyclic, oracle_cap=3)
        assert g.delta_welfare is None and g.beta is None
        with pytest.raises(OracleTooLargeError):
            preference_gaps(cyclic, with_delta=True, oracle_cap=3)
        assert preference_gaps(cyclic, with_delta=False).beta is None

    @settings(max_examples=60, deadline=None)
    @given(perm_profiles(max_n=5))
    def test_matches_reference(self, p):
        a, b = p.agent_utilities.tolist(), p.arm_utilities.tolist()
        g = preference_gaps(p)
        if p.n > 1:
            assert g.delta_a == ref.within_gap(a)
            assert g.delta_b == ref.within_gap(b)
        assert g.gamma == min(ref.cross_gap(a), ref.cross_gap(b))
        assert g.gamma_a <= g.delta_a and g.gamma_b <= g.delta_b
        assert g.delta_welfare == ref.welfare_gap(a, b)
