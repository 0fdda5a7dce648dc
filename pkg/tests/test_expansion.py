"""Digit streams, the expansion of 1, evaluation, and run-length statistics."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from betaruns import (
    DigitWord,
    RunLengthState,
    beta_transform,
    digit_stream,
    evaluate,
    expansion_of_one,
    run_length,
)


class TestTransform:
    def test_fixed_point_base2(self, base2):
        assert beta_transform(base2.one) == base2.one

    def test_golden_unit(self, golden):
        assert beta_transform(golden.one) == golden.beta - 1

    def test_golden_conjugate_maps_to_one(self, golden):
        assert beta_transform(golden.beta - 1) == golden.one

    def test_domain_enforced(self, golden):
        with pytest.raises(ValueError):
            beta_transform(golden.zero)
        with pytest.raises(ValueError):
            beta_transform(golden.lift(2))


class TestDigitStream:
    def test_zero_convention(self, base2):
        assert digit_stream(base2.zero).take(5) == [0, 0, 0, 0, 0]

    def test_dyadic_point(self, base2):
        assert digit_stream(base2.lift(Fraction(3, 8))).take(6) == [0, 1, 0, 1, 1, 1]

    def test_golden_unit_periodic(self, golden):
        assert digit_stream(golden.one).take(8) == [1, 0, 1, 0, 1, 0, 1, 0]

    def test_out_of_range(self, golden):
        with pytest.raises(ValueError):
            digit_stream(golden.lift(Fraction(3, 2)))

    def test_orbit_containment_sampled(self, golden, base2, base95):
        rng = random.Random(11)
        plans = ((golden, 100, 200), (base2, 100, 200), (base95, 50, 120))
        for ctx, points, steps in plans:
            for _ in range(points):
                x = ctx.lift(Fraction(rng.randrange(1, 997), 997))
                stream = digit_stream(x)
                stream.take(steps)  # raises if the orbit ever leaves (0, 1]
                orbit = stream.orbit
                assert orbit.compare(0) > 0 and orbit.compare(1) <= 0


class TestExpansionOfOne:
    def test_base2_all_ones(self, base2):
        exp = expansion_of_one(base2, 50)
        assert exp.prefix(10) == (1,) * 10
        assert all(exp.tail_zero_run(i) == 0 for i in range(1, 20))
        assert exp.max_tail_run(50) == 0

    def test_golden_alternating(self, golden):
        exp = expansion_of_one(golden, 20)
        assert exp.prefix(6) == (1, 0, 1, 0, 1, 0)
        assert exp.tail_zero_run(1) == 1
        assert exp.tail_zero_run(2) == 0
        assert all(exp.max_tail_run(i) == 1 for i in range(1, 10 ** 4 + 1))

    def test_three_halves(self, base32):
        exp = expansion_of_one(base32, 5)
        assert exp.prefix(3) == (1, 0, 1)

    def test_max_tail_run_nondecreasing(self, base95):
        exp = expansion_of_one(base95, 40)
        runs = [exp.max_tail_run(i) for i in range(1, 40)]
        assert runs == sorted(runs)

    def test_read_ahead_cap(self):
        # for a base this close to 1 the expansion of 1 opens with a zero run
        # in the twenties, so a tiny cap must trip
        from betaruns import BudgetExceededError, make_beta
        from betaruns.expansion import ExpansionOfOne

        ctx = make_beta("11/10")
        exp = ExpansionOfOne(ctx, read_ahead_cap=5)
        with pytest.raises(BudgetExceededError):
            exp.tail_zero_run(1)
        exp_ok = ExpansionOfOne(ctx, read_ahead_cap=100)
        assert exp_ok.tail_zero_run(1) > 5


class TestEvaluate:
    def test_empty_word(self, golden):
        assert evaluate(golden, ()).is_zero

    def test_dyadic(self, base2):
        assert evaluate(base2, (0, 1, 1)).as_fraction() == Fraction(3, 8)

    def test_single_digit(self, golden):
        assert evaluate(golden, (1, 0)) == golden.beta_inv

    def test_remainder_identity(self, golden, base95):
        rng = random.Random(5)
        for ctx in (golden, base95):
            for _ in range(15):
                x = ctx.lift(Fraction(rng.randrange(1, 499), 499))
                stream = digit_stream(x)
                digits = stream.take(rng.randrange(1, 100))
                n = len(digits)
                remainder = x - evaluate(ctx, digits)
                assert remainder == (ctx.beta_inv ** n) * stream.orbit
                assert remainder.compare(0) > 0
                assert remainder.compare(ctx.beta_inv ** n) <= 0


class TestDigitWord:
    def test_alphabet_enforced(self, golden):
        with pytest.raises(ValueError):
            DigitWord(golden, (0, 2))

    def test_roundtrip(self, golden):
        w = DigitWord.parse(golden, "1,0,1")
        assert w.serialize() == "1,0,1"
        assert len(w + DigitWord(golden, (0,))) == 4


class TestRunLength:
    def test_examples(self):
        assert run_length((0, 1, 0, 0, 1), 5) == 2
        assert run_length((1, 1, 1, 1), 4) == 0
        assert run_length((0,) * 9, 9) == 9

    def test_requires_enough_digits(self):
        with pytest.raises(ValueError):
            run_length((0, 1), 5)

    @settings(max_examples=120, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=60))
    def test_streaming_matches_definition(self, digits):
        # reference: brute force over all windows
        n = len(digits)
        best = 0
        for i in range(n):
            for j in range(i, n):
                if all(d == 0 for d in digits[i : j + 1]):
                    best = max(best, j - i + 1)
        assert run_length(digits, n) == best

    @settings(max_examples=120, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=1), min_size=2, max_size=60))
    def test_step_bound_and_monotonicity(self, digits):
        state = RunLengthState()
        prev_r = 0
        for d in digits:
            trailing_before = state.trailing
            state.update(d)
            assert state.r >= prev_r
            assert state.r <= max(prev_r, trailing_before + 1)
            assert state.r <= state.consumed
            prev_r = state.r

    def test_feed_zeros_matches_updates(self):
        a, b = RunLengthState(), RunLengthState()
        for d in (1, 0, 0, 1):
            a.update(d)
            b.update(d)
        a.feed_zeros(7)
        for _ in range(7):
            b.update(0)
        assert (a.consumed, a.trailing, a.best) == (b.consumed, b.trailing, b.best)
