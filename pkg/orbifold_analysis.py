"""
P1 Cube - Orbifold Analysis
Quotient singularity types, coordinate point analysis, orbifold strata,
base loci and baskets of surfaces built from the weighted P1 x P1 x P1 format

Generic forms are handled by weight arithmetic only: a generic form of degree
d contains the monomial m iff deg m = d. No random coefficients are used, so
every analysis is deterministic.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations
from math import gcd
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import Matrix, QQ, Symbol
from sympy.polys.matrices import DomainMatrix

from construction import GENERIC, PolarizedVariety
from format_cube import cube_equations

logger = logging.getLogger(__name__)

UNSUPPORTED_SECTION = "unsupported: non-quasilinear section"


# ---------------------------------------------------------------------------
# Singularity types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class OrbifoldPoint:
    """Cyclic quotient singularity 1/r(a,b); weights are kept reduced mod r"""
    r: int
    a: int
    b: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"order must be >= 1, got {self.r}")
        object.__setattr__(self, 'a', self.a % self.r)
        object.__setattr__(self, 'b', self.b % self.r)

    @property
    def is_isolated(self) -> bool:
        return gcd(self.r, self.a) == 1 and gcd(self.r, self.b) == 1

    @property
    def is_rigid(self) -> bool:
        d = gcd(self.a + self.b, self.r)
        return d < self.r // d

    def rescalings(self) -> Iterator['OrbifoldPoint']:
        for lam in range(1, self.r):
            if gcd(lam, self.r) == 1:
                yield OrbifoldPoint(self.r, lam * self.a, lam * self.b)

    def canonical(self) -> 'OrbifoldPoint':
        """1/r(1,b') with the smallest b' when isolated, else the smallest pair"""
        if self.r == 1:
            return OrbifoldPoint(1, 0, 0)
        if self.is_isolated:
            first = self.b * pow(self.a, -1, self.r) % self.r
            second = self.a * pow(self.b, -1, self.r) % self.r
            return OrbifoldPoint(self.r, 1, min(first, second))
        pairs = []
        for p in self.rescalings():
            pairs.append((p.a, p.b))
            pairs.append((p.b, p.a))
        a, b = min(pairs)
        return OrbifoldPoint(self.r, a, b)

    def __str__(self) -> str:
        return f"1/{self.r}({self.a},{self.b})"


POINT_PATTERN = re.compile(r"^\s*1/(\d+)\((-?\d+),(-?\d+)\)\s*$")


def parse_point(text: str) -> OrbifoldPoint:
    match = POINT_PATTERN.match(text)
    if not match:
        raise ValueError(f"not an orbifold point type: {text!r}")
    return OrbifoldPoint(*(int(g) for g in match.groups()))


@dataclass(frozen=True)
class Classification:
    isolated: bool
    rigid: bool
    canonical: OrbifoldPoint


def classify(r: int, a: int, b: int) -> Classification:
    if r < 2:
        raise ValueError(f"order must be >= 2, got {r}")
    point = OrbifoldPoint(r, a, b)
    return Classification(point.is_isolated, point.is_rigid, point.canonical())


def polarizations(point: OrbifoldPoint, index: int) -> List[OrbifoldPoint]:
    """Rescalings lam*(a,b) of an isolated type whose local canonical class matches O(-index)"""
    found = set()
    for p in point.rescalings():
        for q in (p, OrbifoldPoint(p.r, p.b, p.a)):
            if (q.a + q.b - index) % q.r == 0:
                found.add(OrbifoldPoint(q.r, min(q.a, q.b), max(q.a, q.b)))
    return sorted(found)


@dataclass(frozen=True)
class Basket:
    """Multiset of orbifold points"""
    entries: Tuple[Tuple[OrbifoldPoint, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Dict[OrbifoldPoint, int]) -> 'Basket':
        return cls(tuple(sorted((p, k) for p, k in counts.items() if k > 0)))

    @classmethod
    def from_points(cls, points: Sequence[OrbifoldPoint]) -> 'Basket':
        return cls.from_counts(Counter(points))

    @classmethod
    def parse(cls, text: str) -> 'Basket':
        counts: Counter = Counter()
        if text.strip() in ("", "{}", "smooth"):
            return cls()
        for item in re.findall(r"(?:(\d+)\s*x\s*)?(1/\d+\(-?\d+,-?\d+\))", text):
            k, point = item
            counts[parse_point(point)] += int(k) if k else 1
        return cls.from_counts(counts)

    @property
    def counts(self) -> Dict[OrbifoldPoint, int]:
        return dict(self.entries)

    @property
    def size(self) -> int:
        return sum(k for _, k in self.entries)

    def points(self) -> List[OrbifoldPoint]:
        return [p for p, k in self.entries for _ in range(k)]

    def canonical(self) -> 'Basket':
        counts: Counter = Counter()
        for p, k in self.entries:
            counts[p.canonical()] += k
        return Basket.from_counts(counts)

    def all_isolated(self) -> bool:
        return all(p.is_isolated for p, _ in self.entries)

    def all_rigid(self) -> bool:
        return all(p.is_rigid for p, _ in self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "{}"
        return ", ".join(f"{k} x {p}" for p, k in self.entries)


def ambient_wellformed(weights: Sequence[int]) -> bool:
    """Every n-1 of the ambient weights are coprime"""
    weights = list(weights)
    for i in range(len(weights)):
        rest = weights[:i] + weights[i + 1:]
        if reduce(gcd, rest, 0) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Equations after eliminating the quasilinear targets
# ---------------------------------------------------------------------------

Monomial = Tuple[Tuple[str, int], ...]


def _monomial(counts: Dict[str, int]) -> Monomial:
    return tuple(sorted((k, v) for k, v in counts.items() if v))


@dataclass(frozen=True)
class Term:
    """sign * fixed monomial * product of generic forms, each named by the vertex it replaces"""
    fixed: Monomial
    forms: Tuple[Tuple[str, int], ...] = ()
    sign: int = 1

    @property
    def key(self) -> tuple:
        return (self.fixed, self.forms)

    @property
    def is_fixed(self) -> bool:
        return not self.forms

    def __str__(self) -> str:
        parts = [v if k == 1 else f"{v}^{k}" for v, k in self.fixed]
        parts += [f"G{d}[{label}]" for label, d in self.forms]
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class LocalEquation:
    terms: Tuple[Term, ...]
    degree: int
    source: str

    def __str__(self) -> str:
        return " ".join(("+ " if t.sign > 0 else "- ") + str(t) for t in self.terms)


def substituted_equations(variety: PolarizedVariety) -> List[LocalEquation]:
    """Cube relations with every targeted vertex replaced by a generic form of its degree"""
    recipe = variety.recipe
    targets = {s.target: s.degree for s in recipe.sections if s.is_quasilinear}
    equations = []
    for eq in cube_equations(recipe.cube):
        terms = []
        for sign, pair in ((1, eq.lhs), (-1, eq.rhs)):
            fixed: Counter = Counter()
            forms = []
            for label in pair:
                if label in targets:
                    forms.append((label, targets[label]))
                else:
                    fixed[label] += 1
            terms.append(Term(_monomial(fixed), tuple(sorted(forms)), sign))
        equations.append(LocalEquation(tuple(terms), eq.degree, eq.kind))
    for i, section in enumerate(recipe.sections):
        if section.target == GENERIC:
            equations.append(LocalEquation(
                (Term((), ((f"{GENERIC}{i}", section.degree),)),), section.degree, GENERIC))
    return equations


@lru_cache(maxsize=None)
def _representable(degree: int, weights: Tuple[int, ...]) -> bool:
    """Is there a monomial of this degree in variables of these weights"""
    if degree < 0:
        return False
    if degree == 0:
        return True
    reach = [True] + [False] * degree
    for n in range(1, degree + 1):
        reach[n] = any(w <= n and reach[n - w] for w in weights)
    return reach[degree]


def _monomials(degree: int, variables: Tuple[Tuple[str, int], ...]) -> Iterator[Dict[str, int]]:
    if not variables:
        if degree == 0:
            yield {}
        return
    (label, w), rest = variables[0], variables[1:]
    rest_weights = tuple(sorted({x for _, x in rest}))
    for k in range(degree // w, -1, -1):
        remaining = degree - k * w
        if not _representable(remaining, rest_weights):
            continue
        for tail in _monomials(remaining, rest):
            out = dict(tail)
            if k:
                out[label] = k
            yield out


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def rational_rref(rows: List[list]) -> List[List[Fraction]]:
    """Nonzero rows of the reduced row echelon form over QQ"""
    if not rows or not rows[0]:
        return []
    exact = [[(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in rows]
    reduced, pivots = DomainMatrix.from_list(exact, QQ).rref()
    return [[_to_fraction(x) for x in row] for row in reduced.to_list()[:len(pivots)]]


def _rank(rows: List[List[int]]) -> int:
    return len(rational_rref(rows))


def _pivots(rows: list) -> Tuple[int, ...]:
    """Pivot columns of a matrix whose entries may involve generic coefficients"""
    if not rows or not rows[0]:
        return ()
    _, pivots = DomainMatrix.from_Matrix(Matrix(rows)).to_field().rref()
    return tuple(pivots)


def _divisors(n: int) -> List[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# Torus orbits, points, strata and base loci
# ---------------------------------------------------------------------------

EMPTY = -1

Condition = Tuple[Tuple[Term, Fraction], ...]


@dataclass(frozen=True)
class OrbitReport:
    """X restricted to the points whose nonzero coordinates are exactly `support`"""
    support: Tuple[str, ...]
    dimension: int
    lattice_rank: int = 0
    conditions: Tuple[Condition, ...] = ()

    @property
    def nonempty(self) -> bool:
        return self.dimension >= 0


@dataclass(frozen=True)
class PointAnalysis:
    """Tangent/local split at a point of X with the given support"""
    support: Tuple[str, ...]
    weight: int
    on_x: bool
    tangent: Tuple[str, ...] = ()
    local: Tuple[str, ...] = ()
    point: Optional[OrbifoldPoint] = None
    status: str = "off"
    count: int = 1

    @property
    def label(self) -> str:
        return "+".join(self.support)


@dataclass(frozen=True)
class LocusComponent:
    support: Tuple[str, ...]
    dimension: int

    @property
    def label(self) -> str:
        return "+".join(self.support)


@dataclass(frozen=True)
class StratumReport:
    """X meeting the locus of ambient points with isotropy divisible by `order`"""
    order: int
    variables: Tuple[str, ...]
    dimension: int
    components: Tuple[LocusComponent, ...]

    @property
    def coordinate_points(self) -> List[str]:
        return [c.support[0] for c in self.components if len(c.support) == 1]


@dataclass
class BasketResult:
    basket: Basket
    flags: List[str] = field(default_factory=list)
    analyses: List[PointAnalysis] = field(default_factory=list)

    @property
    def resolved(self) -> bool:
        return not self.flags


@dataclass(frozen=True)
class QuasismoothSummary:
    certified: Tuple[str, ...]
    unresolved: Tuple[str, ...]
    external: Tuple[str, ...]


class SurfaceAnalyzer:
    """Combinatorial singularity analysis of one built variety"""

    def __init__(self, variety: PolarizedVariety):
        self.variety = variety
        self.labels = [label for label, _ in variety.ambient]
        self.weights = variety.weights_by_label
        self.equations = substituted_equations(variety)
        self._index = {label: i for i, label in enumerate(self.labels)}
        self._orbits: Dict[Tuple[str, ...], OrbitReport] = {}

    def _sorted(self, support: Sequence[str]) -> Tuple[str, ...]:
        return tuple(sorted(set(support), key=self._index.__getitem__))

    def _weights_of(self, support: Sequence[str]) -> Tuple[int, ...]:
        return tuple(sorted({self.weights[v] for v in support}))

    def _order_of(self, support: Sequence[str]) -> int:
        return reduce(gcd, (self.weights[v] for v in support), 0)

    @staticmethod
    def _supported(term: Term, support: set, weights: Tuple[int, ...]) -> bool:
        return (all(v in support for v, _ in term.fixed)
                and all(_representable(d, weights) for _, d in term.forms))

    @staticmethod
    def _characters(term: Term, variables: Tuple[Tuple[str, int], ...]) -> Iterator[Counter]:
        def extend(i: int, acc: Counter) -> Iterator[Counter]:
            if i == len(term.forms):
                yield acc
                return
            for m in _monomials(term.forms[i][1], variables):
                merged = Counter(acc)
                merged.update(m)
                yield from extend(i + 1, merged)
        yield from extend(0, Counter(dict(term.fixed)))

    # -- orbits ------------------------------------------------------------

    def orbit(self, support: Sequence[str]) -> OrbitReport:
        key = self._sorted(support)
        if key not in self._orbits:
            self._orbits[key] = self._compute_orbit(key)
        return self._orbits[key]

    def _compute_orbit(self, key: Tuple[str, ...]) -> OrbitReport:
        support = set(key)
        weights = self._weights_of(key)
        variables = tuple((v, self.weights[v]) for v in key)

        columns: Dict[tuple, Term] = {}
        rows = []
        for eq in self.equations:
            row: Dict[tuple, int] = {}
            for term in eq.terms:
                if self._supported(term, support, weights):
                    columns.setdefault(term.key, term)
                    row[term.key] = row.get(term.key, 0) + term.sign
            if any(row.values()):
                rows.append(row)
        order = list(columns)
        reduced = rational_rref([[row.get(k, 0) for k in order] for row in rows])

        # binomials cut a subtorus, everything else is a generic condition on it
        lattice: List[List[int]] = []
        pending: List[Condition] = []
        for reduced_row in reduced:
            entries = tuple((columns[order[i]], c) for i, c in enumerate(reduced_row) if c)
            if len(entries) == 2 and all(t.is_fixed for t, _ in entries):
                first, second = dict(entries[0][0].fixed), dict(entries[1][0].fixed)
                lattice.append([first.get(v, 0) - second.get(v, 0) for v in key])
            else:
                pending.append(entries)
        rank = _rank(lattice)

        conditions = []
        for entries in pending:
            status = self._condition_status(entries, variables, lattice, rank)
            if status == "empty":
                return OrbitReport(key, EMPTY, rank)
            if status == "condition":
                conditions.append(entries)
        dimension = len(key) - 1 - rank - len(conditions)
        return OrbitReport(key, max(dimension, EMPTY), rank, tuple(conditions))

    def _condition_status(self, entries: Condition, variables, lattice, rank: int) -> str:
        base = None
        for term, _ in entries:
            for char in self._characters(term, variables):
                vector = [char.get(v, 0) for v, _ in variables]
                if base is None:
                    base = vector
                    continue
                diff = [a - b for a, b in zip(vector, base)]
                if any(diff) and _rank(lattice + [diff]) > rank:
                    return "condition"
        # a single character on the subtorus never vanishes
        if all(t.is_fixed for t, _ in entries) and sum(c for _, c in entries) == 0:
            return "vacuous"
        return "empty"

    def orbit_point_count(self, report: OrbitReport) -> Optional[int]:
        """Points of a 0-dimensional orbit cut from a P(w_a, w_b) torus by one generic condition"""
        if (len(report.support) != 2 or report.lattice_rank or report.dimension != 0
                or len(report.conditions) != 1):
            return None
        a, b = report.support
        wa, wb = self.weights[a], self.weights[b]
        step = wb // gcd(wa, wb)
        variables = ((a, wa), (b, wb))
        exponents = [char.get(a, 0) for term, _ in report.conditions[0]
                     for char in self._characters(term, variables)]
        return (max(exponents) - min(exponents)) // step

    # -- points ------------------------------------------------------------

    def _touches(self, term: Term, support: set, weights: Tuple[int, ...], x: str) -> bool:
        """Does the term contain a monomial (support monomial) * x"""
        fixed = dict(term.fixed)
        if any(v not in support and v != x for v in fixed):
            return False
        fx = fixed.get(x, 0)
        if fx > 1:
            return False
        degrees = [d for _, d in term.forms]
        if fx == 1:
            return all(_representable(d, weights) for d in degrees)
        w = self.weights[x]
        for i, d in enumerate(degrees):
            others = degrees[:i] + degrees[i + 1:]
            if _representable(d - w, weights) and all(_representable(e, weights) for e in others):
                return True
        return False

    def point_analysis(self, support: Sequence[str]) -> PointAnalysis:
        key = self._sorted(support)
        order = self._order_of(key)
        if not self.orbit(key).nonempty:
            return PointAnalysis(key, order, on_x=False)

        inside = set(key)
        weights = self._weights_of(key)
        outside = [v for v in self.labels if v not in inside]
        coordinate = len(key) == 1
        symbols: Dict[tuple, Symbol] = {}

        def coefficient(name: tuple) -> Symbol:
            if name not in symbols:
                symbols[name] = Symbol(f"c{len(symbols)}")
            return symbols[name]

        # Jacobian at a general point of the orbit; the first column is the
        # direction along the orbit closure when the support is not a vertex
        rows = []
        for eq in self.equations:
            row = []
            if not coordinate:
                row.append(sum((t.sign * coefficient((t.key, "orbit")) for t in eq.terms
                                if self._supported(t, inside, weights)), 0))
            for x in outside:
                entry = 0
                for t in eq.terms:
                    if self._touches(t, inside, weights, x):
                        entry += t.sign if coordinate and t.is_fixed else t.sign * coefficient((t.key, x))
                row.append(entry)
            rows.append(row)

        offset = 0 if coordinate else 1
        tangent = tuple(outside[i - offset] for i in _pivots(rows) if i >= offset)
        local = tuple(v for v in outside if v not in tangent)
        dim = self.variety.dim
        if len(local) != dim:
            return PointAnalysis(key, order, True, tangent, local, None, "unresolved")
        if order == 1:
            return PointAnalysis(key, order, True, tangent, local, None, "smooth")
        point = OrbifoldPoint(order, *sorted(self.weights[v] % order for v in local)) if dim == 2 else None
        return PointAnalysis(key, order, True, tangent, local, point, "orbifold")

    def coordinate_points(self) -> List[PointAnalysis]:
        return [self.point_analysis((v,)) for v in self.labels]

    # -- loci --------------------------------------------------------------

    def _maximal_orbits(self, variables: Sequence[str], keep=None) -> List[LocusComponent]:
        found: List[LocusComponent] = []
        for size in range(len(variables), 0, -1):
            for support in combinations(variables, size):
                if keep is not None and not keep(support):
                    continue
                if any(set(support) <= set(c.support) for c in found):
                    continue
                report = self.orbit(support)
                if report.nonempty:
                    found.append(LocusComponent(report.support, report.dimension))
        return sorted(found, key=lambda c: (-c.dimension, [self._index[v] for v in c.support]))

    def stratum_orders(self) -> List[int]:
        counts: Counter = Counter()
        for label in self.labels:
            for g in _divisors(self.weights[label]):
                if g > 1:
                    counts[g] += 1
        return sorted(g for g, k in counts.items() if k >= 2)

    def strata(self) -> List[StratumReport]:
        reports = []
        for g in self.stratum_orders():
            variables = tuple(v for v in self.labels if self.weights[v] % g == 0)
            components = self._maximal_orbits(variables)
            dimension = max((c.dimension for c in components), default=EMPTY)
            reports.append(StratumReport(g, variables, dimension, tuple(components)))
        return reports

    def wellformed(self) -> bool:
        return all(s.dimension <= self.variety.dim - 2 for s in self.strata())

    def base_locus(self, degree: int) -> List[LocusComponent]:
        """Components of X inside the common zeros of all degree-d monomials"""
        return self._maximal_orbits(
            self.labels, keep=lambda support: not _representable(degree, self._weights_of(support)))

    # -- baskets -----------------------------------------------------------

    def basket(self) -> BasketResult:
        if not self.variety.recipe.is_quasilinear:
            return BasketResult(Basket(), [UNSUPPORTED_SECTION])

        counts: Counter = Counter()
        flags: List[str] = []
        analyses: List[PointAnalysis] = []
        for size in range(1, len(self.labels) + 1):
            for support in combinations(self.labels, size):
                order = self._order_of(support)
                if order < 2:
                    continue
                report = self.orbit(support)
                if not report.nonempty:
                    continue
                name = "+".join(report.support)
                if report.dimension > 0:
                    flags.append(f"orbifold locus of order {order} along {name} "
                                 f"has dimension {report.dimension}")
                    continue
                count = 1 if size == 1 else self.orbit_point_count(report)
                if count is None:
                    flags.append(f"unresolved: points of order {order} on {name} not pinned")
                    continue
                analysis = replace(self.point_analysis(support), count=count)
                analyses.append(analysis)
                if analysis.status != "orbifold":
                    flags.append(f"unresolved: possibly not quasismooth at {name}")
                    continue
                counts[analysis.point] += count

        result = BasketResult(Basket.from_counts(counts), flags, analyses)
        logger.debug("basket %s flags %s", result.basket, flags)
        return result

    def quasismooth_summary(self, degree: Optional[int] = None) -> QuasismoothSummary:
        if degree is None:
            degrees = [s.degree for s in self.variety.recipe.sections if s.is_quasilinear]
            degree = max(degrees, default=self.variety.kappa)
        points = [p for p in self.coordinate_points() if p.on_x]
        return QuasismoothSummary(
            certified=tuple(p.label for p in points if p.status != "unresolved"),
            unresolved=tuple(p.label for p in points if p.status == "unresolved"),
            external=tuple(c.label for c in self.base_locus(degree) if c.dimension > 0),
        )


def coordinate_points(variety: PolarizedVariety) -> List[PointAnalysis]:
    return SurfaceAnalyzer(variety).coordinate_points()


def strata(variety: PolarizedVariety) -> List[StratumReport]:
    return SurfaceAnalyzer(variety).strata()


def wellformed(variety: PolarizedVariety) -> bool:
    return SurfaceAnalyzer(variety).wellformed()


def base_locus(variety: PolarizedVariety, degree: int) -> List[LocusComponent]:
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    return SurfaceAnalyzer(variety).base_locus(degree)


def basket(variety: PolarizedVariety) -> BasketResult:
    return SurfaceAnalyzer(variety).basket()
