"""Exact field arithmetic: construction, comparisons, ceilings, approximation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from betaruns import (
    BetaSpec,
    SpecError,
    approximate,
    certified_ceil,
    certified_compare,
    certified_floor,
    make_beta,
    parse_beta,
)


class TestSpecs:
    def test_integer_base(self):
        ctx = make_beta(BetaSpec.rational(2, 1))
        assert ctx.alphabet_top == 1
        assert ctx.degree == 1

    def test_golden_registry(self):
        ctx = make_beta("golden")
        assert ctx.alphabet_top == 1
        q = approximate(ctx.beta, 10)
        assert Fraction(161, 100) < q < Fraction(162, 100)

    def test_base_below_one_rejected(self):
        with pytest.raises(SpecError):
            make_beta(BetaSpec.rational(1, 2))

    def test_zero_denominator_rejected(self):
        with pytest.raises(SpecError):
            make_beta(BetaSpec.rational(3, 0))

    def test_parse_formats(self):
        assert parse_beta("9/5").kind == "rational"
        assert parse_beta("2").denominator == 1
        spec = parse_beta("poly:1,-1,-1@3/2,2")
        ctx = make_beta(spec)
        assert ctx.degree == 2
        assert (ctx.beta * ctx.beta) == (ctx.beta + 1)

    def test_not_square_free_rejected(self):
        with pytest.raises(SpecError):
            make_beta("poly:1,-2,1@1/2,3")  # (x-1)^2

    def test_multiple_roots_rejected(self):
        with pytest.raises(SpecError):
            make_beta("poly:2,-7,6@5/4,9/4")  # roots 3/2 and 2

    def test_no_root_rejected(self):
        with pytest.raises(SpecError):
            make_beta("poly:1,-1,-1@9/5,2")

    def test_interval_must_lie_above_one(self):
        with pytest.raises(SpecError):
            make_beta("poly:1,0,-1,-1@1/2,3/2")

    def test_alphabet_tops(self):
        assert make_beta("9/5").alphabet_top == 1
        assert make_beta("3").alphabet_top == 2
        assert make_beta("tribonacci").alphabet_top == 1
        assert make_beta("plastic").alphabet_top == 1


class TestArithmetic:
    def test_minimal_polynomial_identity(self, golden):
        b = golden.beta
        assert b * b == b + 1
        assert (b * b - b - 1).is_zero

    def test_additive_identity(self, golden):
        a = golden.element([Fraction(2, 3), Fraction(-1, 7)])
        assert a + 0 == a

    def test_unit_times_base(self, golden):
        assert (golden.beta - 1) * golden.beta == golden.one

    def test_compare_examples(self, golden):
        a = golden.element([Fraction(1, 3), Fraction(2, 5)])
        assert certified_compare(a, a) == 0
        assert certified_compare(golden.beta, golden.one) > 0
        assert certified_compare(golden.beta * golden.beta - golden.beta - 1, golden.zero) == 0

    def test_ceil_examples(self, golden):
        assert certified_ceil(golden.one) == 1
        assert certified_ceil(golden.beta) == 2
        assert certified_ceil(golden.beta * (golden.beta - 1)) == 1
        assert certified_floor(golden.beta) == 1

    def test_approximate_examples(self, golden, base2):
        assert approximate(base2.lift(Fraction(1, 2)), 5) == Fraction(1, 2)
        q = approximate(golden.beta, 10)
        assert abs(q - Fraction(16180339887, 10 ** 10)) < Fraction(1, 2 ** 9)
        q2 = approximate(golden.beta - 1, 10)
        assert abs(q2 - Fraction(6180339887, 10 ** 10)) < Fraction(1, 2 ** 9)

    def test_context_mixing_rejected(self, golden, base2):
        from betaruns import ContextMismatchError

        with pytest.raises(ContextMismatchError):
            golden.beta + base2.one


_coeff = st.fractions(
    min_value=Fraction(-8), max_value=Fraction(8), max_denominator=16
)


def _elements(ctx):
    return st.lists(_coeff, min_size=ctx.degree, max_size=ctx.degree).map(ctx.element)


class TestFieldProperties:
    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_ring_axioms_exact(self, data, golden, tribonacci, base95):
        ctx = data.draw(st.sampled_from([golden, tribonacci, base95]))
        elems = _elements(ctx)
        a, b, c = data.draw(elems), data.draw(elems), data.draw(elems)
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_total_order(self, data, golden, tribonacci):
        ctx = data.draw(st.sampled_from([golden, tribonacci]))
        elems = _elements(ctx)
        a, b, c = data.draw(elems), data.draw(elems), data.draw(elems)
        assert certified_compare(a, b) == -certified_compare(b, a)
        if certified_compare(a, b) <= 0 and certified_compare(b, c) <= 0:
            assert certified_compare(a, c) <= 0

    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_ceil_bracket(self, data, golden, base95):
        ctx = data.draw(st.sampled_from([golden, base95]))
        a = data.draw(_elements(ctx))
        c = certified_ceil(a)
        assert certified_compare(a, ctx.lift(c)) <= 0
        assert certified_compare(a, ctx.lift(c - 1)) > 0

    @settings(max_examples=40, deadline=None)
    @given(data=st.data(), bits=st.integers(min_value=1, max_value=48))
    def test_approximate_bound(self, data, bits, golden, tribonacci):
        ctx = data.draw(st.sampled_from([golden, tribonacci]))
        a = data.draw(_elements(ctx))
        q = approximate(a, bits)
        q_fine = approximate(a, bits + 32)
        assert abs(q - q_fine) + Fraction(1, 2 ** (bits + 32)) <= Fraction(1, 2 ** bits)
