"""
Test suite for the Riemann-Roch engine.

Covers:
- The smooth part in closed form
- Calibrated point contributions and their consistency on other planes
- Candidate types from weights
- Basket matching against built surfaces

The sweep over every plane P(a,b,c) with abc <= 500 is slow; set P1CUBE_FULL_CALIBRATION=1 to run it.
"""

import os
import unittest
from fractions import Fraction
from math import gcd

from construction import BuildRecipe, build, invariants
from format_cube import MuVector
from orbifold_analysis import Basket, OrbifoldPoint, basket
from rr_engine import (
    CalibrationIncompleteError, CalibrationSpace, Calibrator, InconsistentInvariantsError,
    calibrate, candidate_points_from_weights, match_basket, polarized_candidates,
    rr_consistent, smooth_series
)
from series_algebra import expand
from test_construction import index_model_recipe, sporadic_recipe

FULL_CALIBRATION = os.environ.get("P1CUBE_FULL_CALIBRATION") == "1"

QUARTIC = BuildRecipe.from_mu(MuVector(0, 1, 0, 1, 1, 2), sections=[(4, "X222")])
SEXTIC = BuildRecipe.from_mu(MuVector(0, 0, 0, 0, 1, 1), sections=[(1, "X222")])


class TestSmoothPart(unittest.TestCase):

    def test_weighted_plane_values(self):
        coeffs = expand(smooth_series(4, Fraction(1, 2)), 3)
        self.assertEqual(coeffs, [1, Fraction(9, 4), 4, Fraction(25, 4)])

    def test_constant_term(self):
        self.assertEqual(expand(smooth_series(2, Fraction(7, 3)), 0), [1])

    def test_smooth_surface_has_no_correction(self):
        variety = build(SEXTIC)
        self.assertTrue(variety.series.same_function(smooth_series(1, Fraction(6))))


class TestCalibration(unittest.TestCase):
    """Contributions solved on P(1,b,r)"""

    def setUp(self):
        self.table = calibrate([OrbifoldPoint(2, 1, 1), OrbifoldPoint(3, 1, 1), OrbifoldPoint(5, 1, 2)], 7)

    def test_order_two(self):
        contribution = self.table.contribution(OrbifoldPoint(2, 1, 1))
        self.assertEqual(contribution.values, (0, Fraction(-1, 4)))
        self.assertEqual(str(contribution.numerator), "-1/4t")

    def test_order_three(self):
        contribution = self.table.contribution(OrbifoldPoint(3, 1, 1))
        self.assertEqual(contribution.values, (0, 0, Fraction(-1, 3)))

    def test_polarized_form_relabels_characters(self):
        contribution = self.table.contribution(OrbifoldPoint(3, 2, 2))
        self.assertEqual(contribution.values, (0, Fraction(-1, 3), 0))

    def test_smooth_point(self):
        self.assertEqual(self.table.contribution(OrbifoldPoint(1, 0, 0)).values, (0,))

    def test_periodic_with_zero_at_multiples(self):
        for point, contribution in self.table.entries.items():
            self.assertEqual(contribution.period, point.r)
            self.assertEqual(contribution.coefficient(0), 0)
            self.assertEqual(contribution.coefficient(3 * point.r), 0)

    def test_provenance(self):
        notes = self.table.provenance[OrbifoldPoint(5, 1, 2)]
        self.assertIn("solved on P(1,2,5)", notes)
        self.assertIn("checked on P(1,3,5)", notes)
        self.assertEqual(self.table.provenance[OrbifoldPoint(2, 1, 1)][-1], "checked on P(2,3,5)")

    def test_verification_uses_weights_above_the_order(self):
        table = calibrate([OrbifoldPoint(5, 1, 1)], 7)
        self.assertEqual(table.provenance[OrbifoldPoint(5, 1, 1)],
                         ["solved on P(1,1,5)", "checked on P(2,5,7)"])

    def test_unverified_when_no_plane_fits(self):
        table = calibrate([OrbifoldPoint(2, 1, 1)], 2)
        self.assertTrue(table.provenance[OrbifoldPoint(2, 1, 1)][-1].startswith("unverified"))

    def test_consistency_on_other_planes(self):
        calibrator = Calibrator(11)
        for weights in ((2, 3, 5), (1, 2, 3), (2, 5, 7), (3, 4, 5), (3, 5, 11)):
            self.assertTrue(calibrator.consistent(CalibrationSpace(weights)), str(weights))

    def test_bound_and_isolation(self):
        with self.assertRaises(CalibrationIncompleteError) as ctx:
            calibrate([OrbifoldPoint(7, 1, 1)], 5)
        self.assertIn("calibration incomplete", str(ctx.exception))
        with self.assertRaises(CalibrationIncompleteError):
            calibrate([OrbifoldPoint(4, 2, 2)], 5)
        with self.assertRaises(CalibrationIncompleteError):
            self.table.contribution(OrbifoldPoint(7, 1, 3))

    def test_calibration_space_needs_coprime_weights(self):
        with self.assertRaises(ValueError):
            CalibrationSpace((2, 4, 5))


@unittest.skipUnless(FULL_CALIBRATION, "set P1CUBE_FULL_CALIBRATION=1 to sweep every small plane")
class TestAllSmallPlanes(unittest.TestCase):
    """Every pairwise coprime P(a,b,c), a <= b <= c, with abc <= 500"""

    def test_consistent(self):
        calibrator = Calibrator(1)
        planes = 0
        for c in range(1, 501):
            for b in range(1, min(c, 500 // c) + 1):
                for a in range(1, min(b, 500 // (b * c)) + 1):
                    if gcd(a, b) != 1 or gcd(a, c) != 1 or gcd(b, c) != 1:
                        continue
                    calibrator.bound = max(calibrator.bound, c)
                    planes += 1
                    with self.subTest(plane=(a, b, c)):
                        self.assertTrue(calibrator.consistent(CalibrationSpace((a, b, c))))
        self.assertGreater(planes, 1000)


class TestCandidates(unittest.TestCase):

    def test_rigid_isolated_types(self):
        self.assertEqual(candidate_points_from_weights([1, 2, 2, 3, 3, 3]), [OrbifoldPoint(3, 1, 1)])
        self.assertEqual(candidate_points_from_weights([1, 1, 1]), [])

    def test_index_model_types_present(self):
        found = set(candidate_points_from_weights([1, 3, 9, 11, 13, 19, 21]))
        for point in (OrbifoldPoint(3, 1, 1), OrbifoldPoint(9, 1, 1), OrbifoldPoint(13, 3, 8),
                      OrbifoldPoint(19, 2, 9), OrbifoldPoint(21, 13, 19)):
            self.assertIn(point.canonical(), found)

    def test_polarized(self):
        self.assertEqual(polarized_candidates([OrbifoldPoint(3, 1, 1)], 1), [OrbifoldPoint(3, 2, 2)])


class TestMatchBasket(unittest.TestCase):
    """Baskets from Hilbert series"""

    def _match(self, variety, report):
        candidates = polarized_candidates(candidate_points_from_weights(variety.ambient_weights),
                                          report.fano_index)
        table = calibrate(candidates, max(variety.ambient_weights))
        return match_basket(variety.series, report.fano_index, report.dsq, candidates, table), table

    def test_quartic_example(self):
        variety = build(QUARTIC)
        found, _ = self._match(variety, invariants(variety))
        self.assertEqual(found, [Basket.from_counts({OrbifoldPoint(3, 2, 2): 3})])

    def test_smooth_sextic(self):
        variety = build(SEXTIC)
        table = calibrate([OrbifoldPoint(3, 1, 1)], 3)
        found = match_basket(variety.series, 1, Fraction(6), [OrbifoldPoint(3, 2, 2)], table)
        self.assertEqual(found, [Basket()])

    def test_wrong_invariants(self):
        variety = build(QUARTIC)
        table = calibrate([OrbifoldPoint(3, 1, 1)], 3)
        with self.assertRaises(InconsistentInvariantsError) as ctx:
            match_basket(variety.series, 1, Fraction(2), [OrbifoldPoint(3, 2, 2)], table)
        self.assertIn("inconsistent invariants", str(ctx.exception))

    def test_candidate_order_irrelevant(self):
        variety = build(QUARTIC)
        table = calibrate([OrbifoldPoint(3, 1, 1), OrbifoldPoint(2, 1, 1)], 3)
        first = match_basket(variety.series, 1, Fraction(1), [OrbifoldPoint(3, 2, 2), OrbifoldPoint(2, 1, 1)], table)
        second = match_basket(variety.series, 1, Fraction(1), [OrbifoldPoint(2, 1, 1), OrbifoldPoint(3, 2, 2)], table)
        self.assertEqual(first, second)

    def test_index_model_contains_geometric_basket(self):
        variety = build(index_model_recipe("MI4", 1))
        report = invariants(variety)
        found, table = self._match(variety, report)
        geometric = basket(variety).basket
        self.assertIn(geometric, found)
        self.assertTrue(rr_consistent(variety.series, report.fano_index, report.dsq, geometric, table))


class TestGeometricBasketsAreConsistent(unittest.TestCase):
    """P_X = P_smooth + sum of the contributions of the analyzed points"""

    def _check(self, recipe):
        variety = build(recipe)
        report = invariants(variety)
        geometric = basket(variety)
        self.assertTrue(geometric.resolved, geometric.flags)
        table = calibrate(geometric.basket.counts, max(variety.ambient_weights))
        return rr_consistent(variety.series, report.fano_index, report.dsq, geometric.basket, table)

    def test_quartic(self):
        self.assertTrue(self._check(QUARTIC))

    def test_four_points_rejected(self):
        variety = build(QUARTIC)
        table = calibrate([OrbifoldPoint(3, 1, 1)], 3)
        wrong = Basket.from_counts({OrbifoldPoint(3, 2, 2): 4})
        self.assertFalse(rr_consistent(variety.series, 1, Fraction(1), wrong, table))

    def test_index_model(self):
        for n in (1, 2):
            self.assertTrue(self._check(index_model_recipe("MI4", n)), f"n={n}")

    def test_sporadic_model(self):
        self.assertTrue(self._check(sporadic_recipe(4)))


if __name__ == '__main__':
    unittest.main()
