"""
P1 Cube - Series Algebra
Exact sparse Laurent polynomials, cyclotomic denominators and Hilbert series

Every coefficient is a fractions.Fraction; nothing in this module (or in the
modules built on it) ever touches floating point.
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Dict, Iterable, List, Tuple, Union


class P1CubeError(Exception):
    """Base class for every error raised by the toolkit"""


class NotPowerSeriesError(P1CubeError):
    pass


class PoleOrderMismatchError(P1CubeError):
    pass


class InexactDivisionError(P1CubeError):
    pass


Number = Union[int, Fraction]


def _frac(value: Number) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse Laurent polynomial in t; terms are (exponent, coefficient) pairs sorted by exponent"""
    items: Tuple[Tuple[int, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, terms: Dict[int, Number]) -> 'LaurentPoly':
        return cls(tuple(sorted((int(e), _frac(c)) for e, c in terms.items() if c != 0)))

    @classmethod
    def constant(cls, value: Number) -> 'LaurentPoly':
        return cls.from_dict({0: value})

    @classmethod
    def monomial(cls, exponent: int, coefficient: Number = 1) -> 'LaurentPoly':
        return cls.from_dict({exponent: coefficient})

    @classmethod
    def one_minus(cls, d: int) -> 'LaurentPoly':
        """The polynomial 1 - t^d"""
        if d == 0:
            return cls()
        return cls.from_dict({0: 1, d: -1})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self.items)

    def is_zero(self) -> bool:
        return not self.items

    def coefficient(self, exponent: int) -> Fraction:
        for e, c in self.items:
            if e == exponent:
                return c
        return Fraction(0)

    def min_exponent(self) -> int:
        return self.items[0][0] if self.items else 0

    def max_exponent(self) -> int:
        return self.items[-1][0] if self.items else 0

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.items)

    def __add__(self, other: 'LaurentPoly') -> 'LaurentPoly':
        terms: Dict[int, Fraction] = dict(self.items)
        for e, c in other.items:
            terms[e] = terms.get(e, Fraction(0)) + c
        return LaurentPoly.from_dict(terms)

    def __neg__(self) -> 'LaurentPoly':
        return LaurentPoly(tuple((e, -c) for e, c in self.items))

    def __sub__(self, other: 'LaurentPoly') -> 'LaurentPoly':
        return self + (-other)

    def __mul__(self, other: Union['LaurentPoly', int, Fraction]) -> 'LaurentPoly':
        if not isinstance(other, LaurentPoly):
            scalar = _frac(other)
            return LaurentPoly.from_dict({e: c * scalar for e, c in self.items})
        terms: Dict[int, Fraction] = {}
        for e1, c1 in self.items:
            for e2, c2 in other.items:
                terms[e1 + e2] = terms.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentPoly.from_dict(terms)

    __rmul__ = __mul__

    def shift(self, k: int) -> 'LaurentPoly':
        """Multiply by t^k"""
        return LaurentPoly(tuple((e + k, c) for e, c in self.items))

    def reversed(self, degree: int) -> 'LaurentPoly':
        """t^degree * N(1/t)"""
        return LaurentPoly.from_dict({degree - e: c for e, c in self.items})

    def value_at_one(self) -> Fraction:
        return sum((c for _, c in self.items), Fraction(0))

    def exact_divide(self, divisor: 'LaurentPoly') -> 'LaurentPoly':
        """Exact quotient; raises InexactDivisionError on a nonzero remainder"""
        if divisor.is_zero():
            raise InexactDivisionError("inexact division: division by zero polynomial")
        if self.is_zero():
            return LaurentPoly()
        low = self.min_exponent() - divisor.min_exponent()
        num = self.shift(-self.min_exponent())
        den = divisor.shift(-divisor.min_exponent())
        rem = [Fraction(0)] * (num.max_exponent() + 1)
        for e, c in num.items:
            rem[e] = c
        d_deg = den.max_exponent()
        d_lead = den.items[-1][1]
        quotient: Dict[int, Fraction] = {}
        for top in range(len(rem) - 1, d_deg - 1, -1):
            c = rem[top]
            if c == 0:
                continue
            q = c / d_lead
            quotient[top - d_deg] = q
            for e, dc in den.items:
                rem[top - d_deg + e] -= q * dc
        if any(rem):
            raise InexactDivisionError(
                f"inexact division: ({self}) is not divisible by ({divisor})")
        return LaurentPoly.from_dict(quotient).shift(low)

    def __str__(self) -> str:
        if not self.items:
            return "0"
        parts: List[str] = []
        for e, c in self.items:
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if e == 0:
                body = str(mag)
            else:
                power = "t" if e == 1 else f"t^{e}"
                body = power if mag == 1 else f"{mag}{power}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


@dataclass(frozen=True)
class CyclotomicProduct:
    """The product of (1 - t^w) over a multiset of positive integers w"""
    factors: Tuple[int, ...] = ()

    def __post_init__(self):
        if any(w < 1 for w in self.factors):
            raise ValueError(f"denominator factors must be >= 1, got {self.factors}")
        object.__setattr__(self, 'factors', tuple(sorted(self.factors)))

    def extended(self, weights: Iterable[int]) -> 'CyclotomicProduct':
        return CyclotomicProduct(self.factors + tuple(weights))

    def without(self, weights: Iterable[int]) -> 'CyclotomicProduct':
        weights = tuple(weights)
        remaining = Counter(self.factors)
        remaining.subtract(Counter(weights))
        if any(v < 0 for v in remaining.values()):
            raise ValueError(f"cannot remove {list(weights)} from {self.factors}")
        return CyclotomicProduct(tuple(remaining.elements()))

    def as_poly(self) -> LaurentPoly:
        result = LaurentPoly.constant(1)
        for w in self.factors:
            result = result * LaurentPoly.one_minus(w)
        return result

    def join(self, other: 'CyclotomicProduct') -> 'CyclotomicProduct':
        """Smallest multiset containing both factor multisets"""
        merged = Counter(self.factors) | Counter(other.factors)
        return CyclotomicProduct(tuple(merged.elements()))

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "".join(f"(1 - t^{w})" if w > 1 else "(1 - t)" for w in self.factors)


@dataclass(frozen=True)
class HilbertSeries:
    """numerator / prod (1 - t^w): a formal power series in t"""
    numerator: LaurentPoly
    denominator: CyclotomicProduct = field(default_factory=CyclotomicProduct)

    def expand(self, order: int) -> List[Fraction]:
        return expand(self, order)

    def residue_at_one(self, k: int) -> Fraction:
        return residue_at_one(self, k)

    def times_one_minus(self, d: int) -> 'HilbertSeries':
        return HilbertSeries(self.numerator * LaurentPoly.one_minus(d), self.denominator)

    def over_one_minus(self, d: int) -> 'HilbertSeries':
        return HilbertSeries(self.numerator, self.denominator.extended([d]))

    def simplified(self) -> 'HilbertSeries':
        """Cancel every denominator factor that divides the numerator exactly"""
        numerator = self.numerator
        kept: List[int] = []
        for w in sorted(self.denominator.factors, reverse=True):
            try:
                numerator = numerator.exact_divide(LaurentPoly.one_minus(w))
            except InexactDivisionError:
                kept.append(w)
        return HilbertSeries(numerator, CyclotomicProduct(tuple(kept)))

    def _over(self, common: CyclotomicProduct) -> LaurentPoly:
        return self.numerator * common.without(self.denominator.factors).as_poly()

    def __add__(self, other: 'HilbertSeries') -> 'HilbertSeries':
        common = self.denominator.join(other.denominator)
        return HilbertSeries(self._over(common) + other._over(common), common)

    def __sub__(self, other: 'HilbertSeries') -> 'HilbertSeries':
        common = self.denominator.join(other.denominator)
        return HilbertSeries(self._over(common) - other._over(common), common)

    def scaled(self, k: Number) -> 'HilbertSeries':
        return HilbertSeries(self.numerator * k, self.denominator)

    def same_function(self, other: 'HilbertSeries') -> bool:
        """Equality as rational functions (cross-multiplied, exact)"""
        return (self - other).numerator.is_zero()

    def __str__(self) -> str:
        return f"({self.numerator}) / {self.denominator}"


def expand(series: HilbertSeries, order: int) -> List[Fraction]:
    """Coefficients c_0..c_order of the power series expansion"""
    if order < 0:
        raise ValueError("order must be >= 0")
    numerator = series.numerator
    if numerator.min_exponent() < 0:
        reduced = series.simplified()
        if reduced.numerator.min_exponent() < 0:
            raise NotPowerSeriesError(
                f"not a power series: numerator has exponent {numerator.min_exponent()}")
        series, numerator = reduced, reduced.numerator

    # integer numerators (every geometric series here) stay on int arithmetic
    if numerator.is_integral():
        coeffs: list = [0] * (order + 1)
        for e, c in numerator.items:
            if e <= order:
                coeffs[e] = int(c)
    else:
        coeffs = [Fraction(0)] * (order + 1)
        for e, c in numerator.items:
            if e <= order:
                coeffs[e] = c

    for w in series.denominator.factors:
        for n in range(w, order + 1):
            coeffs[n] += coeffs[n - w]
    return [_frac(c) for c in coeffs]


def _split_at_one(series: HilbertSeries) -> Tuple[LaurentPoly, int]:
    """Numerator with every (1 - t) factor removed, and the resulting pole order at t = 1"""
    numerator = series.numerator
    numerator = numerator.shift(-numerator.min_exponent())
    one_minus_t = LaurentPoly.one_minus(1)
    zeros = 0
    while numerator.value_at_one() == 0:
        numerator = numerator.exact_divide(one_minus_t)
        zeros += 1
    return numerator, len(series.denominator.factors) - zeros


def pole_order_at_one(series: HilbertSeries) -> int:
    if series.numerator.is_zero():
        return 0
    return _split_at_one(series)[1]


def residue_at_one(series: HilbertSeries, k: int) -> Fraction:
    """Value of (1-t)^k * series at t = 1, by exact cancellation of (1 - t) factors"""
    if series.numerator.is_zero():
        raise PoleOrderMismatchError("pole order mismatch: zero series")
    numerator, pole = _split_at_one(series)
    if pole != k:
        raise PoleOrderMismatchError(f"pole order mismatch: pole order is {pole}, expected {k}")
    # (1 - t^w) = (1 - t)(1 + t + ... + t^(w-1)) and the second factor is w at t = 1
    return numerator.value_at_one() / prod(series.denominator.factors)


def format_rational(value: Fraction) -> str:
    """Exact "p/q" rendering used in every report and file format"""
    value = _frac(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())
