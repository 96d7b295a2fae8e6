import math
from fractions import Fraction

import numpy as np
import pytest

from precoder.channel_model import AssociatedSymbol
from precoder.exceptions import BudgetExceeded, NotArithmeticProgression
from precoder.noise_free import (
    NoneExists,
    OutputMultiset,
    Witness,
    construct_disjoint,
    distinct_output_rate,
    exists_disjoint_exhaustive,
    is_arithmetic_progression,
    output_multisets,
    verify_disjoint,
)
from precoder.outcomes import NotApplicable


def random_progression_instance(rng: np.random.Generator):
    M = int(rng.integers(2, 6))
    Q = int(rng.integers(2, 5))
    start = Fraction(int(rng.integers(-10, 10)), int(rng.integers(1, 4)))
    step = Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 3)))
    x = [start + k * step for k in range(M)]
    # half the levels sit on the progression lattice, where outputs collide the most
    s = set()
    while len(s) < Q:
        if rng.random() < 0.5:
            s.add(int(rng.integers(-6, 7)) * step)
        else:
            s.add(Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 4))))
    s = list(s)
    rng.shuffle(s)
    return x, s


class TestConstruction:
    def test_four_pam(self):
        tuples = construct_disjoint([-3, -1, 1, 3], [-2, 2])
        assert [t.indices for t in tuples] == [(0, 2), (1, 3), (2, 0), (3, 1)]
        assert verify_disjoint(output_multisets(tuples, [-3, -1, 1, 3], [-2, 2]))

    def test_caller_order_of_levels(self):
        x, s = [-3, -1, 1, 3], [2, -2]
        tuples = construct_disjoint(x, s)
        assert verify_disjoint(output_multisets(tuples, x, s))
        for q in range(2):
            assert sorted(t.indices[q] for t in tuples) == [0, 1, 2, 3]

    def test_not_progression(self):
        with pytest.raises(NotArithmeticProgression):
            construct_disjoint([0, 1, 2, 4], [0, 1, 3])

    @pytest.mark.parametrize("seed", range(100))
    def test_random_progressions(self, seed):
        x, s = random_progression_instance(np.random.default_rng(seed))
        tuples = construct_disjoint(x, s)
        assert len(tuples) == len(x)
        assert verify_disjoint(output_multisets(tuples, x, s))
        for q in range(len(s)):
            assert sorted(t.indices[q] for t in tuples) == list(range(len(x)))

    @pytest.mark.parametrize("seed", range(20))
    def test_two_levels_any_alphabet(self, seed):
        rng = np.random.default_rng(1000 + seed)
        x = sorted(set(Fraction(int(v), 4) for v in rng.integers(-40, 41, size=5)))
        s = [Fraction(0), Fraction(int(rng.integers(1, 30)), 4)]
        result = exists_disjoint_exhaustive(x, s)
        assert isinstance(result, Witness)
        assert verify_disjoint(result.multisets)


class TestExhaustive:
    def test_counterexample(self):
        result = exists_disjoint_exhaustive([0, 1, 2, 4], [0, 1, 3])
        assert isinstance(result, NoneExists)
        assert result.status == "NoneExists"
        assert result.nodes > 0

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            exists_disjoint_exhaustive([0, 1, 2, 4], [0, 1, 3], budget=10)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(50))
    def test_agrees_with_construction(self, seed):
        x, s = random_progression_instance(np.random.default_rng(500 + seed))
        result = exists_disjoint_exhaustive(x, s)
        assert isinstance(result, Witness)
        assert verify_disjoint(result.multisets)
        assert verify_disjoint(output_multisets(construct_disjoint(x, s), x, s))


class TestHelpers:
    def test_progression(self):
        assert is_arithmetic_progression([Fraction(3), Fraction(1), Fraction(5)])
        assert not is_arithmetic_progression([Fraction(0), Fraction(1), Fraction(3)])

    def test_verify_allows_repeats_within_one_set(self):
        assert verify_disjoint([OutputMultiset((Fraction(1), Fraction(1))), OutputMultiset((Fraction(2), Fraction(3)))])
        assert not verify_disjoint([OutputMultiset((Fraction(1), Fraction(2))), OutputMultiset((Fraction(2),))])

    def test_multiset_contents(self):
        ms = OutputMultiset.of(AssociatedSymbol((0, 0)), [Fraction(1), Fraction(2)], [Fraction(0), Fraction(0.5)])
        assert ms.values == (Fraction(1), Fraction(3, 2))
        assert Fraction(3, 2) in ms
        assert len(ms) == 2

    def test_exact_decimals(self):
        # 0.1 + 0.2 == 0.3 exactly here, so the outputs collide
        assert isinstance(distinct_output_rate([0.1, 0.2], [0.0, 0.1]), NotApplicable)

    def test_distinct_output_rate(self):
        assert distinct_output_rate([0, 1, 2, 3], [0, 10]) == pytest.approx(math.log2(4))
        assert isinstance(distinct_output_rate([0, 1, 2, 3], [0, 1]), NotApplicable)
