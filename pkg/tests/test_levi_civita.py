import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from infinikit import levi_civita as lc
from infinikit.errors import DivisionByZeroError, InfiniteInputError
from infinikit._rat import Rat, as_rat


def rand_rat(rng, span=50):
    return as_rat(Fraction(rng.randint(-span, span), rng.randint(1, span)))


def rand_lc(rng, max_terms=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        q = as_rat(Fraction(rng.randint(-4, 8), rng.randint(1, 3)))
        terms[q] = rand_rat(rng)
    return lc.make(terms.items())


rat_st = st.fractions(
    min_value=-50, max_value=50, max_denominator=20
).map(as_rat)

exponent_st = st.fractions(
    min_value=-3, max_value=6, max_denominator=3
).map(as_rat)


@st.composite
def lc_st(draw, max_terms=3):
    pairs = draw(
        st.dictionaries(exponent_st, rat_st, min_size=1, max_size=max_terms)
    )
    return lc.make(pairs.items())


class TestArithmetic:
    def test_ring_identities(self):
        rng = random.Random(1)
        for _ in range(300):
            a, b, c = (rand_lc(rng) for _ in range(3))
            assert lc.add(a, b) == lc.add(b, a)
            assert lc.mul(a, b) == lc.mul(b, a)
            assert lc.add(lc.add(a, b), c) == lc.add(a, lc.add(b, c))
            assert lc.mul(lc.mul(a, b), c) == lc.mul(a, lc.mul(b, c))
            assert lc.mul(a, lc.add(b, c)) == lc.add(lc.mul(a, b), lc.mul(a, c))
            assert lc.sub(a, a) == lc.from_rational(0)

    def test_difference_of_squares(self):
        one_plus = lc.add(lc.from_rational(1), lc.EPS)
        one_minus = lc.sub(lc.from_rational(1), lc.EPS)
        got = lc.mul(one_plus, one_minus)
        assert got == lc.make([(0, 1), (2, -1)])

    def test_spec_free_constants(self):
        assert lc.format_lc(lc.add(lc.from_rational(3), lc.EPS)) == "3 + 1*eps^1"
        assert lc.format_lc(lc.from_rational(0)) == "0"

    @given(lc_st(), lc_st())
    @settings(max_examples=120, deadline=None)
    def test_add_mul_commute(self, a, b):
        assert lc.add(a, b) == lc.add(b, a)
        assert lc.mul(a, b) == lc.mul(b, a)

    @given(lc_st(), lc_st(), lc_st())
    @settings(max_examples=80, deadline=None)
    def test_distributive(self, a, b, c):
        lhs = lc.mul(a, lc.add(b, c))
        rhs = lc.add(lc.mul(a, b), lc.mul(a, c))
        assert lhs == rhs


class TestInverse:
    def test_inverse_of_eps_is_infinite(self):
        got = lc.inv(lc.EPS)
        assert got == lc.make([(-1, 1)])
        assert lc.classify(got) is lc.Classification.INFINITE

    def test_zero_inverse_rejected(self):
        with pytest.raises(DivisionByZeroError):
            lc.inv(lc.from_rational(0))

    def test_residual_valuation_exceeds_cutoff(self):
        rng = random.Random(2)
        one = lc.from_rational(1)
        for _ in range(200):
            a = rand_lc(rng)
            if not a.terms:
                continue
            residual = lc.sub(lc.mul(a, lc.inv(a)), one)
            if residual.terms:
                v = residual.terms[0][0]
                assert v > lc.DEFAULT_INV_CUTOFF

    def test_exact_geometric_example(self):
        # 1/(1 - eps) truncates to 1 + eps + ... + eps^8
        a = lc.sub(lc.from_rational(1), lc.EPS)
        got = lc.inv(a)
        want = lc.make([(k, 1) for k in range(9)])
        assert got == want

    def test_cutoff_parameter(self):
        a = lc.sub(lc.from_rational(1), lc.EPS)
        got = lc.inv(a, cutoff=3)
        assert got == lc.make([(k, 1) for k in range(4)])


class TestOrderAndClass:
    def test_classify_table(self):
        C = lc.Classification
        assert lc.classify(lc.from_rational(0)) is C.ZERO
        assert lc.classify(lc.EPS) is C.INFINITESIMAL
        assert lc.classify(lc.from_rational(5)) is C.APPRECIABLE
        assert lc.classify(lc.add(lc.from_rational(5), lc.EPS)) is C.APPRECIABLE
        assert lc.classify(lc.inv(lc.EPS)) is C.INFINITE

    def test_eps_below_every_rational(self):
        for denom in (1, 10, 10**6, 10**12):
            r = lc.from_rational(Fraction(1, denom))
            assert lc.compare(lc.EPS, r) is lc.Ordering.LESS

    def test_order_respects_addition(self):
        rng = random.Random(3)
        for _ in range(200):
            a, b, c = (rand_lc(rng) for _ in range(3))
            if lc.compare(a, b) is lc.Ordering.LESS:
                assert lc.compare(lc.add(a, c), lc.add(b, c)) is lc.Ordering.LESS

    def test_square_nonnegative(self):
        rng = random.Random(4)
        zero = lc.from_rational(0)
        for _ in range(200):
            a = rand_lc(rng)
            sq = lc.mul(a, a)
            assert lc.compare(sq, zero) in (lc.Ordering.GREATER, lc.Ordering.EQUAL)


class TestStandardPart:
    def test_examples(self):
        assert lc.standard_part(lc.add(lc.from_rational(3), lc.EPS)) == 3
        assert lc.standard_part(lc.from_rational(Fraction(7, 2))) == Rat(7, 2)
        assert lc.standard_part(lc.EPS) == 0

    def test_infinite_rejected(self):
        with pytest.raises(InfiniteInputError):
            lc.standard_part(lc.inv(lc.EPS))

    def test_st_is_ring_homomorphism_on_finite(self):
        rng = random.Random(5)
        for _ in range(300):
            a, b = rand_lc(rng), rand_lc(rng)
            if a.terms and a.terms[0][0] < 0:
                continue
            if b.terms and b.terms[0][0] < 0:
                continue
            assert lc.standard_part(lc.add(a, b)) == (
                lc.standard_part(a) + lc.standard_part(b)
            )
            assert lc.standard_part(lc.mul(a, b)) == (
                lc.standard_part(a) * lc.standard_part(b)
            )


def symbolic_derivative(coeffs, x0):
    # oracle: power rule applied to the coefficient list directly
    x0 = as_rat(x0)
    total = as_rat(0)
    for k in range(1, len(coeffs)):
        total += as_rat(k) * as_rat(coeffs[k]) * x0 ** (k - 1)
    return total


class TestCalculus:
    def test_poly_eval_at_shifted_point(self):
        # f(x) = x^2 at 3 + eps gives 9 + 6 eps + eps^2
        got = lc.poly_eval([0, 0, 1], lc.add(lc.from_rational(3), lc.EPS))
        assert got == lc.make([(0, 9), (1, 6), (2, 1)])

    def test_derivative_examples(self):
        assert lc.derivative([0, 0, 1], 3) == 6
        assert lc.derivative([0, -2, 0, 1], 1) == 1
        assert lc.derivative([7], 12) == 0

    def test_derivative_matches_oracle(self):
        rng = random.Random(6)
        for _ in range(200):
            deg = rng.randint(0, 12)
            coeffs = [rand_rat(rng, 20) for _ in range(deg + 1)]
            x0 = rand_rat(rng, 10)
            assert lc.derivative(coeffs, x0) == symbolic_derivative(coeffs, x0)

    def test_continuity_at_every_point(self):
        rng = random.Random(7)
        for _ in range(100):
            deg = rng.randint(0, 8)
            coeffs = [rand_rat(rng, 20) for _ in range(deg + 1)]
            x0 = rand_rat(rng, 10)
            assert lc.continuity_check(coeffs, x0, lc.EPS)
            assert lc.continuity_check(coeffs, x0, lc.mul(lc.EPS, lc.EPS))

    def test_constant_function_continuity(self):
        assert lc.continuity_check([7], 3, lc.EPS)


class TestFormat:
    def test_round_trip_examples(self):
        cases = [
            lc.from_rational(Fraction(1, 2)),
            lc.EPS,
            lc.make([(0, 3), (1, 1)]),
            lc.make([(Fraction(3, 2), 1)]),
            lc.make([(-1, 2), (0, -5)]),
        ]
        from infinikit.exprs import parse, eval_expr

        for a in cases:
            text = lc.format_lc(a)
            assert eval_expr(parse(text), "lc") == a

    def test_ascending_exponent_order(self):
        a = lc.make([(2, 1), (0, 3), (1, -2)])
        text = lc.format_lc(a)
        assert text.index("eps^1") < text.index("eps^2")
