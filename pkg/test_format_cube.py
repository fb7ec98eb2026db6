"""
Test suite for the weighted P1 x P1 x P1 format.

Covers:
- Vertex weights, socle degree and the antipodal rule
- Reconstruction of mu from labelled weights
- The format Hilbert series (straight Segre oracle, palindromy)
- The nine binomial relations
"""

import unittest
from collections import Counter
from itertools import product

from format_cube import (
    VERTEX_LABELS, MuVector, NonpositiveWeightError,
    NotAdditiveCubeError, antipode, cube_equations, cube_from_weights,
    cube_weights, degree_formula, hilbert_series_wp, q1_polynomial
)
from series_algebra import expand

STRAIGHT = MuVector(0, 0, 0, 0, 1, 1)
EXAMPLE_QUARTIC = MuVector(0, 1, 0, 1, 1, 2)
MI4_R8 = MuVector(0, 2, 0, 5, 1, 8)


class TestCubeWeights(unittest.TestCase):
    """Vertex weights from mu"""

    def test_straight_cube(self):
        cube = cube_weights(STRAIGHT)
        self.assertEqual(cube.weight_list(), [1] * 8)
        self.assertEqual(cube.socle_degree, 2)

    def test_quartic_example(self):
        cube = cube_weights(EXAMPLE_QUARTIC)
        self.assertEqual(cube.weight_list(), [1, 2, 2, 2, 3, 3, 3, 4])
        self.assertEqual(cube.socle_degree, 5)

    def test_index_model_cube(self):
        cube = cube_weights(MI4_R8)
        self.assertEqual(cube.weight_list(), [1, 3, 6, 8, 8, 10, 13, 15])
        self.assertEqual(cube.socle_degree, 16)

    def test_antipodal_sums(self):
        for mu in (STRAIGHT, EXAMPLE_QUARTIC, MI4_R8, MuVector(2, 5, -1, 3, 4, 4)):
            cube = cube_weights(mu)
            for label in VERTEX_LABELS:
                self.assertEqual(cube.weight(label) + cube.weight(antipode(label)), cube.socle_degree)

    def test_nonpositive_weight(self):
        with self.assertRaises(NonpositiveWeightError) as ctx:
            cube_weights(MuVector(0, 0, 0, 0, 0, 0))
        self.assertIn("nonpositive vertex weight", str(ctx.exception))


class TestCubeFromWeights(unittest.TestCase):
    """Accepting labelled weights"""

    def test_all_ones(self):
        cube = cube_from_weights({label: 1 for label in VERTEX_LABELS})
        self.assertEqual(cube.mu, STRAIGHT)

    def test_reconstructed_sporadic_cube(self):
        """{2, (r+1)^3, (2r)^3, 3r-1} at r = 4"""
        weights = {"X111": 2, "X211": 5, "X121": 5, "X112": 5,
                   "X221": 8, "X212": 8, "X122": 8, "X222": 11}
        cube = cube_from_weights(weights)
        self.assertEqual(cube.mu, MuVector(0, 3, 0, 3, 2, 5))

    def test_printed_sporadic_cube_rejected(self):
        weights = {"X111": 2, "X211": 5, "X121": 5, "X112": 5,
                   "X221": 7, "X212": 7, "X122": 7, "X222": 7}
        with self.assertRaises(NotAdditiveCubeError) as ctx:
            cube_from_weights(weights)
        self.assertIn("not an additive cube", str(ctx.exception))
        self.assertIn("axis a", str(ctx.exception))

    def test_round_trip_up_to_canonical(self):
        for mu in (EXAMPLE_QUARTIC, MI4_R8, MuVector(3, 1, 2, 2, -1, 6)):
            rebuilt = cube_from_weights(cube_weights(mu).weights)
            self.assertEqual(rebuilt.weights, cube_weights(mu).weights)
            self.assertEqual(rebuilt.mu.canonical(), mu.canonical())


class TestCanonicalMu(unittest.TestCase):

    def test_sorted_differences(self):
        self.assertEqual(MuVector(0, 5, 0, 2, 3, 4).canonical(), MuVector(0, 1, 0, 2, 3, 8))

    def test_translation_invariance(self):
        self.assertEqual(MuVector(4, 6, -4, 1, 1, 8).canonical(), MI4_R8.canonical())

    def test_sign_flip(self):
        self.assertEqual(MuVector(2, 0, 0, 5, 1, 8).canonical(), MI4_R8)


class TestFormatHilbertSeries(unittest.TestCase):
    """The Gorenstein format numerator"""

    def test_straight_numerator(self):
        series = hilbert_series_wp(STRAIGHT)
        self.assertEqual(str(series.numerator), "1 - 9t^2 + 16t^3 - 9t^4 + t^6")
        self.assertEqual(series.denominator.factors, (1,) * 8)

    def test_segre_oracle(self):
        self.assertEqual(expand(hilbert_series_wp(STRAIGHT), 20), [(n + 1) ** 3 for n in range(21)])

    def test_palindromic(self):
        for mu in (EXAMPLE_QUARTIC, MI4_R8, MuVector(0, 3, 0, 3, 2, 5)):
            numerator = hilbert_series_wp(mu).numerator
            self.assertEqual(numerator.reversed(3 * mu.socle_degree), numerator)
            self.assertGreaterEqual(numerator.min_exponent(), 0)

    def test_nonnegative_integer_coefficients(self):
        for c in expand(hilbert_series_wp(MI4_R8), 60):
            self.assertEqual(c.denominator, 1)
            self.assertGreaterEqual(c, 0)

    def test_monomial_count(self):
        """h0(n) counts products of n vertices modulo the relations: (m+1)^3 per tridegree m"""
        mu = EXAMPLE_QUARTIC
        coeffs = expand(hilbert_series_wp(mu), 30)
        for n in range(31):
            count = 0
            for m in range(n + 1):
                for ea, eb, ec in product(range(m + 1), repeat=3):
                    weight = (m * (mu.a1 + mu.b1 + mu.c1) + ea * (mu.a2 - mu.a1)
                              + eb * (mu.b2 - mu.b1) + ec * (mu.c2 - mu.c1))
                    if weight == n:
                        count += 1
            self.assertEqual(coeffs[n], count, f"degree {n}")

    def test_degree_formula_matches_residue(self):
        for mu in (STRAIGHT, EXAMPLE_QUARTIC, MI4_R8, MuVector(0, 1, 0, 0, 1, 1), MuVector(0, 3, 0, 3, 2, 5)):
            self.assertEqual(hilbert_series_wp(mu).residue_at_one(4), degree_formula(mu))


class TestCubeEquations(unittest.TestCase):
    """The 6 face minors and 3 diagonal differences"""

    def test_count_and_straight_degrees(self):
        equations = cube_equations(cube_weights(STRAIGHT))
        self.assertEqual(len(equations), 9)
        self.assertTrue(all(eq.degree == 2 for eq in equations))
        self.assertIn("X111*X122 - X112*X121", [str(eq) for eq in equations])

    def test_index_model_degrees(self):
        degrees = sorted(eq.degree for eq in cube_equations(cube_weights(MI4_R8)))
        self.assertEqual(degrees, [9, 11, 14, 16, 16, 16, 18, 21, 23])

    def test_degrees_match_q1_block(self):
        for mu in (STRAIGHT, EXAMPLE_QUARTIC, MI4_R8, MuVector(1, 4, 2, 2, 3, 9)):
            block = q1_polynomial(mu).shift(mu.socle_degree)
            exponents = Counter()
            for e, c in block.items:
                exponents[e] += int(c)
            degrees = Counter(eq.degree for eq in cube_equations(cube_weights(mu)))
            self.assertEqual(degrees, exponents)

    def test_monomials_have_equal_degree(self):
        cube = cube_weights(MuVector(0, 2, 0, 3, 1, 7))
        for eq in cube_equations(cube):
            self.assertEqual(cube.weight(eq.lhs[0]) + cube.weight(eq.lhs[1]), eq.degree)
            self.assertEqual(cube.weight(eq.rhs[0]) + cube.weight(eq.rhs[1]), eq.degree)


if __name__ == '__main__':
    unittest.main()
