import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rilab.balancing import BalanceInstance, BalanceResult, balance_permutation, verify_balance


class TestWorkedExamples:
    def test_four_values_two_blocks(self):
        res = balance_permutation(BalanceInstance((4, 3, 2, 1), 2, 2))
        assert res.sigma == (1, 4, 2, 3)
        assert res.blocks == (5, 5)
        assert res.spread == 0
        assert res.bound_ok

    def test_heavy_head(self):
        res = balance_permutation(BalanceInstance((5, 1, 1, 1, 1, 1), 3, 2))
        assert res.blocks == (6, 2, 2)
        assert res.spread == 4
        assert res.bound_ok  # 4 <= 5

    def test_constant_sequence(self):
        res = balance_permutation(BalanceInstance((3, 3, 3, 3, 3, 3), 2, 3))
        assert res.blocks == (9, 9)
        assert res.spread == 0

    def test_single_block(self):
        res = balance_permutation(BalanceInstance((2, 1), 1, 2))
        assert res.blocks == (3,)
        assert res.sigma == (1, 2)

    def test_one_per_block(self):
        res = balance_permutation(BalanceInstance((9, 4, 1), 3, 1))
        assert res.sigma == (1, 2, 3)
        assert res.blocks == (9, 4, 1)
        assert res.spread == 8 <= 9


class TestValidation:
    def test_wrong_length(self):
        with pytest.raises(ValueError):
            BalanceInstance((3, 2, 1), 2, 2)

    def test_unsorted_rejected_not_sorted(self):
        with pytest.raises(ValueError):
            BalanceInstance((1, 2, 3, 4), 2, 2)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            BalanceInstance((2, 1, 0, -1), 2, 2)


def factorizations(n):
    return [(l, n // l) for l in range(1, n + 1) if n % l == 0]


class TestExhaustiveSmall:
    def test_all_small_integer_sequences(self):
        # every nonincreasing sequence over {0,..,4} of length <= 6,
        # every factorization: bound and bijection hold exactly
        for n in range(1, 7):
            for d in itertools.combinations_with_replacement(range(4, -1, -1), n):
                d = tuple(sorted(d, reverse=True))
                for l, m in factorizations(n):
                    inst = BalanceInstance(d, l, m)
                    res = balance_permutation(inst)
                    assert verify_balance(inst, res)
                    assert res.bound_ok


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 12), st.data())
def test_random_integer_sequences(n, data):
    vals = data.draw(st.lists(st.integers(0, 10 ** 6), min_size=n, max_size=n))
    d = tuple(sorted(vals, reverse=True))
    for l, m in factorizations(n):
        inst = BalanceInstance(d, l, m)
        res = balance_permutation(inst)
        assert verify_balance(inst, res)
        assert res.spread <= (d[0] if d else 0)


def test_round_invariant_holds_throughout():
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(200):
        l, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        d = tuple(sorted(rng.integers(0, 100, size=l * m).tolist(), reverse=True))
        inst = BalanceInstance(d, l, m)
        res = balance_permutation(inst)
        d1 = d[0] if d else 0
        for snapshot in res.round_partials:
            assert max(snapshot) - min(snapshot) <= d1
