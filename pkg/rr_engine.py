"""
P1 Cube - Riemann-Roch Engine
Splits a Hilbert series into a smooth part plus periodic contributions of
orbifold points, calibrates those contributions on weighted projective planes
and matches candidate baskets against a surface's series
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from orbifold_analysis import Basket, OrbifoldPoint, polarizations, rational_rref
from series_algebra import (
    CyclotomicProduct, HilbertSeries, LaurentPoly, P1CubeError, expand, pole_order_at_one
)

logger = logging.getLogger(__name__)


class CalibrationIncompleteError(P1CubeError):
    pass


class ConventionMismatchError(P1CubeError):
    pass


class InconsistentInvariantsError(P1CubeError):
    pass


@dataclass(frozen=True)
class SmoothPart:
    """1 + n(n+I)D^2/2: chi(O) = 1 plus the Riemann-Roch term for nD"""
    index: int
    dsq: Fraction

    def coefficient(self, n: int) -> Fraction:
        return 1 + Fraction(n * (n + self.index)) * self.dsq / 2

    def series(self) -> HilbertSeries:
        return smooth_series(self.index, self.dsq)


def smooth_series(index: int, dsq: Fraction) -> HilbertSeries:
    """Closed form of sum (1 + n(n+I)D^2/2) t^n over (1-t)^3"""
    half = Fraction(dsq) / 2
    numerator = LaurentPoly.from_dict({
        0: 1,
        1: -2 + half * (1 + index),
        2: 1 + half * (1 - index),
    })
    return HilbertSeries(numerator, CyclotomicProduct((1, 1, 1)))


@dataclass(frozen=True)
class PeriodicContribution:
    """Correction c(n) of a point, periodic in n with period r and c(0) = 0"""
    point: OrbifoldPoint
    values: Tuple[Fraction, ...]

    @property
    def period(self) -> int:
        return len(self.values)

    def coefficient(self, n: int) -> Fraction:
        return self.values[n % self.period]

    @property
    def numerator(self) -> LaurentPoly:
        return LaurentPoly.from_dict(dict(enumerate(self.values)))

    def series(self) -> HilbertSeries:
        return HilbertSeries(self.numerator, CyclotomicProduct((self.period,)))

    def relabelled(self, point: OrbifoldPoint, unit: int) -> 'PeriodicContribution':
        """Contribution of the same germ with O(1) acting by the character `unit`"""
        r = self.period
        return PeriodicContribution(point, tuple(self.values[n * unit % r] for n in range(r)))


SMOOTH_POINT = OrbifoldPoint(1, 0, 0)


def _unit_to_base(point: OrbifoldPoint, base: OrbifoldPoint) -> int:
    """lam with lam*(a,b) equal to the base 1/r(1,b') up to swapping"""
    r = point.r
    for unit, other in ((pow(point.a, -1, r), point.b), (pow(point.b, -1, r), point.a)):
        if other * unit % r == base.b:
            return unit
    raise ConventionMismatchError(f"convention mismatch: {point} is not a form of {base}")


@dataclass
class CalibrationTable:
    """Contributions of base types 1/r(1,b'), normalized so that O(1) is the character 1"""
    entries: Dict[OrbifoldPoint, PeriodicContribution] = field(default_factory=dict)
    provenance: Dict[OrbifoldPoint, List[str]] = field(default_factory=dict)

    def __contains__(self, point: OrbifoldPoint) -> bool:
        return point.r == 1 or point.canonical() in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, contribution: PeriodicContribution, notes: Sequence[str] = ()):
        self.entries[contribution.point] = contribution
        self.provenance.setdefault(contribution.point, []).extend(notes)

    def contribution(self, point: OrbifoldPoint) -> PeriodicContribution:
        """Contribution of any polarized isolated type via n -> n*a^{-1}"""
        if point.r == 1:
            return PeriodicContribution(point, (Fraction(0),))
        if not point.is_isolated:
            raise CalibrationIncompleteError(f"calibration incomplete: {point} is not isolated")
        base = point.canonical()
        if base not in self.entries:
            raise CalibrationIncompleteError(f"calibration incomplete: no entry for {base}")
        return self.entries[base].relabelled(point, _unit_to_base(point, base))

    def types(self) -> List[OrbifoldPoint]:
        return sorted(self.entries)


# ---------------------------------------------------------------------------
# Calibration on weighted projective planes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationSpace:
    """P(w1,w2,w3) with pairwise coprime weights, polarized by O(1)"""
    weights: Tuple[int, int, int]

    def __post_init__(self):
        w = self.weights
        if any(gcd(w[i], w[j]) != 1 for i in range(3) for j in range(i + 1, 3)):
            raise ValueError(f"calibration weights must be pairwise coprime: {w}")

    @property
    def index(self) -> int:
        return sum(self.weights)

    @property
    def dsq(self) -> Fraction:
        w1, w2, w3 = self.weights
        return Fraction(1, w1 * w2 * w3)

    def series(self) -> HilbertSeries:
        return HilbertSeries(LaurentPoly.constant(1), CyclotomicProduct(self.weights))

    def points(self) -> List[OrbifoldPoint]:
        """The three coordinate points 1/w_i(w_j, w_k)"""
        w = self.weights
        found = []
        for i in range(3):
            j, k = [x for x in range(3) if x != i]
            found.append(OrbifoldPoint(w[i], w[j], w[k]) if w[i] > 1 else SMOOTH_POINT)
        return found

    def __str__(self) -> str:
        return "P(" + ",".join(str(w) for w in self.weights) + ")"


class Calibrator:
    """Solves base contributions by increasing order and re-checks each on a second space"""

    def __init__(self, bound: int, table: Optional[CalibrationTable] = None):
        self.bound = bound
        self.table = table if table is not None else CalibrationTable()

    def require(self, point: OrbifoldPoint) -> PeriodicContribution:
        if point.r == 1:
            return self.table.contribution(point)
        if not point.is_isolated:
            raise CalibrationIncompleteError(f"calibration incomplete: {point} is not isolated")
        base = point.canonical()
        if base not in self.table.entries:
            self._solve(base)
        return self.table.contribution(point)

    def _solve(self, base: OrbifoldPoint):
        r, b = base.r, base.b
        if r > self.bound:
            raise CalibrationIncompleteError(
                f"calibration incomplete: {base} needs order {r} beyond bound {self.bound}")
        space = CalibrationSpace((1, b, r))
        # the weight-b point has smaller order, so it is known by induction
        known = [self.require(p) for p in space.points() if p.r != r]
        correction = _correction(space.series(), space.index, space.dsq, r - 1)
        values = tuple(correction[n] - sum(c.coefficient(n) for c in known) for n in range(r))
        if values[0] != 0:
            raise ConventionMismatchError(
                f"convention mismatch: {base} has correction {values[0]} at n = 0 on {space}")

        contribution = PeriodicContribution(base, values)
        self.table.add(contribution, [f"solved on {space}"])
        logger.debug("calibrated %s on %s", base, space)

        for check in self._verification_spaces(base, exclude=space):
            others = [p for p in check.points() if p.r > 1 and p.canonical() != base]
            for point in others:
                self.require(point)
            if any(f"solved on {check}" in self.table.provenance.get(p.canonical(), []) for p in others):
                continue
            if not self.consistent(check):
                raise ConventionMismatchError(
                    f"convention mismatch: {base} from {space} disagrees on {check}")
            self.table.provenance[base].append(f"checked on {check}")
            break
        else:
            self.table.provenance[base].append("unverified: no independent space within bound")

    def _verification_spaces(self, base: OrbifoldPoint, exclude: CalibrationSpace) -> List[CalibrationSpace]:
        """Planes P(w1,w2,r) with weights up to the bound whose weight-r point is of type base"""
        r, b = base.r, base.b
        found = set()
        for w1 in range(1, self.bound + 1):
            if gcd(w1, r) != 1:
                continue
            for c in {b, pow(b, -1, r)}:
                for w2 in range(w1 * c % r, self.bound + 1, r):
                    if w2 < w1 or gcd(w1, w2) != 1:
                        continue
                    space = CalibrationSpace(tuple(sorted((w1, w2, r))))
                    if space != exclude:
                        found.add(space)
        return sorted(found, key=lambda s: (max(s.weights), s.weights))

    def consistent(self, space: CalibrationSpace) -> bool:
        """Exact identity: series - smooth part = sum of the three point contributions"""
        total = HilbertSeries(LaurentPoly(), CyclotomicProduct())
        for point in space.points():
            total = total + self.require(point).series()
        return (space.series() - smooth_series(space.index, space.dsq)).same_function(total)


def calibrate(types: Iterable[OrbifoldPoint], bound: int,
              table: Optional[CalibrationTable] = None) -> CalibrationTable:
    """Calibration table covering every requested isolated type"""
    calibrator = Calibrator(bound, table)
    for point in sorted(set(types)):
        calibrator.require(point)
    return calibrator.table


def _correction(series: HilbertSeries, index: int, dsq: Fraction, order: int) -> List[Fraction]:
    smooth = SmoothPart(index, Fraction(dsq))
    return [c - smooth.coefficient(n) for n, c in enumerate(expand(series, order))]


# ---------------------------------------------------------------------------
# Candidates and basket matching
# ---------------------------------------------------------------------------

def _divisors_above_one(n: int) -> List[int]:
    return [d for d in range(2, n + 1) if n % d == 0]


def candidate_points_from_weights(weights: Sequence[int]) -> List[OrbifoldPoint]:
    """Every canonical isolated rigid 1/r(a,b) whose order divides an ambient weight"""
    orders = sorted({d for w in weights for d in _divisors_above_one(w)})
    found = set()
    for r in orders:
        for b in range(1, r):
            if gcd(b, r) != 1:
                continue
            point = OrbifoldPoint(r, 1, b)
            if point.is_rigid:
                found.add(point.canonical())
    return sorted(found)


def polarized_candidates(points: Iterable[OrbifoldPoint], index: int) -> List[OrbifoldPoint]:
    """Local forms of each type compatible with K = O(-index)"""
    found = set()
    for point in points:
        found.update(polarizations(point, index))
    return sorted(found)


def _nonnegative_solutions(rows: List[List[Fraction]], rhs: List[Fraction],
                           max_multiplicity: int) -> List[Tuple[int, ...]]:
    width = len(rows[0])
    reduced = rational_rref([row + [b] for row, b in zip(rows, rhs)])
    pivots = []
    for row in reduced:
        lead = next(i for i, c in enumerate(row) if c)
        if lead == width:
            return []
        pivots.append(lead)
    free = [j for j in range(width) if j not in pivots]
    if len(free) > 6:
        logger.warning("%d free multiplicities; enumerating up to %d each", len(free), max_multiplicity)

    solutions = []
    for values in product(range(max_multiplicity + 1), repeat=len(free)):
        k = [0] * width
        for j, v in zip(free, values):
            k[j] = v
        for row, p in zip(reduced, pivots):
            value = row[width] - sum(row[j] * k[j] for j in free)
            if value < 0 or value.denominator != 1:
                break
            k[p] = int(value)
        else:
            solutions.append(tuple(k))
    return solutions


def _minimal(solutions: List[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    unique = sorted(set(solutions))
    return [s for s in unique
            if not any(t != s and all(x <= y for x, y in zip(t, s)) for t in unique)]


def match_basket(series: HilbertSeries, index: int, dsq: Fraction,
                 candidates: Sequence[OrbifoldPoint], table: CalibrationTable,
                 max_multiplicity: int = 12, row_cap: int = 1500) -> List[Basket]:
    """Nonnegative multiplicities k with P_X - P_smooth = sum k_i P_Q_i"""
    candidates = sorted(set(candidates))
    contributions = [table.contribution(p) for p in candidates]
    smooth = smooth_series(index, dsq)
    if pole_order_at_one(series - smooth) > 1:
        raise InconsistentInvariantsError(
            f"inconsistent invariants: correction grows polynomially for I={index}, D^2={dsq}")

    period = lcm(*(c.period for c in contributions)) if contributions else 1
    longest = max((c.period for c in contributions), default=1)
    window = min(2 * period + longest, row_cap)
    correction = _correction(series, index, dsq, window)
    if correction[0] != 0:
        raise InconsistentInvariantsError(f"inconsistent invariants: h0(0) differs from 1 by {correction[0]}")
    if any(correction[n] != correction[n - period] for n in range(period, window + 1)):
        raise InconsistentInvariantsError(
            f"inconsistent invariants: correction is not periodic with period {period}")

    if not contributions:
        return [Basket()] if not any(correction) else []

    rows = [[c.coefficient(n) for c in contributions] for n in range(1, window + 1)]
    baskets = []
    for k in _minimal(_nonnegative_solutions(rows, correction[1:], max_multiplicity)):
        basket = Basket.from_counts(dict(zip(candidates, k)))
        # the window may be shorter than the full period; confirm as rational functions
        if rr_consistent(series, index, dsq, basket, table):
            baskets.append(basket)
    return sorted(baskets, key=lambda b: (b.size, b.entries))


def basket_series(basket: Basket, table: CalibrationTable) -> HilbertSeries:
    total = HilbertSeries(LaurentPoly(), CyclotomicProduct())
    for point, k in basket.entries:
        total = total + table.contribution(point).series().scaled(k)
    return total


def rr_consistent(series: HilbertSeries, index: int, dsq: Fraction,
                  basket: Basket, table: CalibrationTable) -> bool:
    """Exact identity P_X = P_smooth + sum k_i P_Q_i"""
    return (series - smooth_series(index, dsq)).same_function(basket_series(basket, table))
