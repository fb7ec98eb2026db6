"""
Test suite for the exact series algebra.

Covers:
- Laurent polynomial arithmetic and exact division
- Power series expansion through cyclotomic denominators
- Pole extraction at t = 1
- Rational-function identities between Hilbert series
"""

import unittest
from fractions import Fraction

from series_algebra import (
    CyclotomicProduct, HilbertSeries, InexactDivisionError, LaurentPoly,
    NotPowerSeriesError, PoleOrderMismatchError, expand, format_rational,
    parse_rational, residue_at_one
)


def P(terms):
    return LaurentPoly.from_dict(terms)


class TestLaurentPoly(unittest.TestCase):
    """Exact sparse Laurent polynomial arithmetic"""

    def test_no_zero_coefficients_stored(self):
        poly = P({0: 1, 3: 0, 5: 2}) + P({5: -2})
        self.assertEqual(poly.terms, {0: Fraction(1)})

    def test_negative_exponents(self):
        poly = LaurentPoly.monomial(-2) + LaurentPoly.monomial(2)
        self.assertEqual(poly.min_exponent(), -2)
        self.assertEqual((poly * poly).terms, {-4: 1, 0: 2, 4: 1})

    def test_exact_divide(self):
        """(1 - t^2) / (1 - t) = 1 + t"""
        quotient = LaurentPoly.one_minus(2).exact_divide(LaurentPoly.one_minus(1))
        self.assertEqual(quotient, P({0: 1, 1: 1}))

    def test_inexact_divide_raises(self):
        with self.assertRaises(InexactDivisionError) as ctx:
            LaurentPoly.one_minus(3).exact_divide(LaurentPoly.one_minus(2))
        self.assertIn("inexact division", str(ctx.exception))

    def test_straight_numerator_is_palindromic(self):
        numerator = P({0: 1, 2: -9, 3: 16, 4: -9, 6: 1})
        self.assertEqual(numerator.reversed(6), numerator)

    def test_rendering(self):
        numerator = P({0: 1, 2: -9, 3: 16, 4: -9, 6: 1})
        self.assertEqual(str(numerator), "1 - 9t^2 + 16t^3 - 9t^4 + t^6")
        self.assertEqual(str(P({1: Fraction(-1, 4)})), "-1/4t")

    def test_scalar_multiplication(self):
        poly = Fraction(1, 2) * P({1: 2, 3: 4})
        self.assertEqual(poly.terms, {1: 1, 3: 2})


class TestExpand(unittest.TestCase):
    """Power series coefficients"""

    def test_weighted_monomial_count(self):
        """1/((1-t)^2(1-t^2)) counts monomials in weights 1, 1, 2"""
        series = HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct((1, 1, 2)))
        self.assertEqual(expand(series, 3), [1, 2, 4, 6])

    def test_trivial_cancellation(self):
        series = HilbertSeries(LaurentPoly.one_minus(1), CyclotomicProduct((1,)))
        self.assertEqual(expand(series, 2), [1, 0, 0])

    def test_prefix_property(self):
        series = HilbertSeries(P({0: 1, 3: -1, 5: 2}), CyclotomicProduct((2, 3, 7)))
        long = expand(series, 40)
        for order in (0, 5, 17, 39):
            self.assertEqual(expand(series, order), long[:order + 1])

    def test_multiplying_by_one_minus(self):
        series = HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct((1, 2, 5)))
        base = expand(series, 30)
        shifted = expand(series.times_one_minus(4), 30)
        for n in range(31):
            expected = base[n] - (base[n - 4] if n >= 4 else 0)
            self.assertEqual(shifted[n], expected)

    def test_negative_exponent_not_power_series(self):
        series = HilbertSeries(LaurentPoly.monomial(-1), CyclotomicProduct((1,)))
        with self.assertRaises(NotPowerSeriesError):
            expand(series, 3)

    def test_rational_coefficients(self):
        series = HilbertSeries(LaurentPoly.monomial(1, Fraction(-1, 4)), CyclotomicProduct((2,)))
        self.assertEqual(expand(series, 5), [0, Fraction(-1, 4), 0, Fraction(-1, 4), 0, Fraction(-1, 4)])


class TestResidue(unittest.TestCase):
    """Exact pole extraction at t = 1"""

    def test_weighted_plane(self):
        series = HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct((1, 1, 2)))
        self.assertEqual(residue_at_one(series, 3), Fraction(1, 2))

    def test_simple_pole(self):
        series = HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct((1,)))
        self.assertEqual(residue_at_one(series, 1), 1)

    def test_pole_order_mismatch(self):
        series = HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct((1, 1, 2)))
        with self.assertRaises(PoleOrderMismatchError) as ctx:
            residue_at_one(series, 2)
        self.assertIn("pole order mismatch", str(ctx.exception))

    def test_numeric_limit_cross_check(self):
        series = HilbertSeries(P({0: 1, 3: 1}), CyclotomicProduct((1, 2, 3)))
        exact = residue_at_one(series, 3)
        previous = None
        for j in range(2, 6):
            t = 1 - Fraction(1, 10 ** j)
            num = sum(c * t ** e for e, c in series.numerator.items)
            den = 1
            for w in series.denominator.factors:
                den *= 1 - t ** w
            gap = abs((1 - t) ** 3 * num / den - exact)
            if previous is not None:
                self.assertLess(gap, previous)
            previous = gap
        self.assertLess(previous, Fraction(1, 1000))


class TestSeriesIdentities(unittest.TestCase):
    """Addition, subtraction and equality as rational functions"""

    def test_same_function_after_cancellation(self):
        a = HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct((1,)))
        b = HilbertSeries(P({0: 1, 1: 1}), CyclotomicProduct((2,)))
        self.assertTrue(a.same_function(b))

    def test_sum_expands_to_sum(self):
        a = HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct((1, 3)))
        b = HilbertSeries(LaurentPoly.monomial(2, Fraction(1, 3)), CyclotomicProduct((3, 4)))
        total = expand(a + b, 25)
        self.assertEqual(total, [x + y for x, y in zip(expand(a, 25), expand(b, 25))])

    def test_one_minus_round_trip(self):
        series = HilbertSeries(P({0: 1, 3: -2}), CyclotomicProduct((2, 5)))
        there = series.over_one_minus(3)
        self.assertEqual(there.denominator.factors, (2, 3, 5))
        self.assertTrue(there.times_one_minus(3).same_function(series))
        partial = expand(there, 20)
        base = expand(series, 20)
        for n in range(21):
            self.assertEqual(partial[n], sum(base[n - 3 * k] for k in range(n // 3 + 1)))

    def test_simplified(self):
        series = HilbertSeries(LaurentPoly.one_minus(4), CyclotomicProduct((1, 4)))
        self.assertEqual(series.simplified().denominator.factors, (1,))

    def test_rational_formatting(self):
        self.assertEqual(format_rational(Fraction(4352, 975)), "4352/975")
        self.assertEqual(format_rational(Fraction(6)), "6")
        self.assertEqual(parse_rational("-1/4"), Fraction(-1, 4))


if __name__ == '__main__':
    unittest.main()
