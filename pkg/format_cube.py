"""
P1 Cube - Weighted P1 x P1 x P1 Format
Parameter vector mu, weight cube, Hilbert series of the format and its nine
defining binomial relations
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod
from typing import Dict, List, Tuple

from series_algebra import (
    CyclotomicProduct, HilbertSeries, LaurentPoly, P1CubeError
)


class NonpositiveWeightError(P1CubeError):
    pass


class NotAdditiveCubeError(P1CubeError):
    pass


class FormulaInconsistencyError(P1CubeError):
    pass


# Vertex X_ijk sits at index (i, j, k) in {1,2}^3; i runs along the a-axis,
# j along the b-axis and k along the c-axis.
VERTEX_LABELS: Tuple[str, ...] = tuple(
    f"X{i}{j}{k}" for k, j, i in product((1, 2), repeat=3)
)


def vertex_index(label: str) -> Tuple[int, int, int]:
    return int(label[1]), int(label[2]), int(label[3])


def vertex_label(i: int, j: int, k: int) -> str:
    return f"X{i}{j}{k}"


def antipode(label: str) -> str:
    i, j, k = vertex_index(label)
    return vertex_label(3 - i, 3 - j, 3 - k)


@dataclass(frozen=True)
class MuVector:
    """mu = (a1, a2, b1, b2, c1, c2)"""
    a1: int
    a2: int
    b1: int
    b2: int
    c1: int
    c2: int

    @classmethod
    def of(cls, values) -> 'MuVector':
        values = [int(v) for v in values]
        if len(values) != 6:
            raise ValueError(f"mu needs 6 entries, got {len(values)}")
        return cls(*values)

    def as_tuple(self) -> Tuple[int, ...]:
        return (self.a1, self.a2, self.b1, self.b2, self.c1, self.c2)

    @property
    def socle_degree(self) -> int:
        return sum(self.as_tuple())

    def axis_differences(self) -> Tuple[int, int, int]:
        return (self.a2 - self.a1, self.b2 - self.b1, self.c2 - self.c1)

    def vertex_weight(self, i: int, j: int, k: int) -> int:
        a = (self.a1, self.a2)[i - 1]
        b = (self.b1, self.b2)[j - 1]
        c = (self.c1, self.c2)[k - 1]
        return a + b + c

    def canonical(self) -> 'MuVector':
        """Orbit representative: a1 = b1 = 0, c1 = minimal vertex weight, differences ascending"""
        diffs = sorted(abs(d) for d in self.axis_differences())
        base = min(self.vertex_weight(i, j, k) for i, j, k in product((1, 2), repeat=3))
        return MuVector(0, diffs[0], 0, diffs[1], base, base + diffs[2])

    def __str__(self) -> str:
        return f"({self.a1},{self.a2}:{self.b1},{self.b2}:{self.c1},{self.c2})"


@dataclass(frozen=True)
class WeightCube:
    """The eight labelled vertex weights of a weighted P1 x P1 x P1"""
    mu: MuVector
    vertices: Tuple[Tuple[str, int], ...]

    @property
    def weights(self) -> Dict[str, int]:
        return dict(self.vertices)

    def weight(self, label: str) -> int:
        return self.weights[label]

    @property
    def socle_degree(self) -> int:
        return self.mu.socle_degree

    def weight_list(self) -> List[int]:
        return sorted(w for _, w in self.vertices)

    def __str__(self) -> str:
        return " ".join(f"{label}={w}" for label, w in self.vertices)


@dataclass(frozen=True)
class CubeEquation:
    """A binomial m1 - m2, each monomial a pair of vertex labels"""
    lhs: Tuple[str, str]
    rhs: Tuple[str, str]
    degree: int
    kind: str

    def __str__(self) -> str:
        return f"{self.lhs[0]}*{self.lhs[1]} - {self.rhs[0]}*{self.rhs[1]}"


def cube_weights(mu: MuVector) -> WeightCube:
    vertices = []
    for label in VERTEX_LABELS:
        w = mu.vertex_weight(*vertex_index(label))
        if w <= 0:
            raise NonpositiveWeightError(
                f"nonpositive vertex weight: {label} has weight {w} for mu={mu}")
        vertices.append((label, w))
    return WeightCube(mu, tuple(vertices))


def cube_from_weights(weights: Dict[str, int]) -> WeightCube:
    """Accept eight labelled weights iff they come from some mu; reconstruct mu with a1 = b1 = 0"""
    missing = [label for label in VERTEX_LABELS if label not in weights]
    if missing:
        raise NotAdditiveCubeError(f"not an additive cube: missing vertices {missing}")
    w = {label: int(weights[label]) for label in VERTEX_LABELS}

    violated = []
    for axis, step in (("a", (1, 0, 0)), ("b", (0, 1, 0)), ("c", (0, 0, 1))):
        diffs = set()
        for i, j, k in product((1, 2), repeat=3):
            if (i, j, k)[step.index(1)] == 2:
                continue
            upper = vertex_label(i + step[0], j + step[1], k + step[2])
            diffs.add(w[upper] - w[vertex_label(i, j, k)])
        if len(diffs) != 1:
            violated.append(axis)
    if violated:
        raise NotAdditiveCubeError(
            f"not an additive cube: edge differences disagree along axis {', '.join(violated)}")

    base = w["X111"]
    mu = MuVector(0, w["X211"] - base, 0, w["X121"] - base, base, base + w["X112"] - base)
    return cube_weights(mu)


def _axis_sum(diff: int) -> LaurentPoly:
    # sum over i != j of t^(a_i - a_j)
    return LaurentPoly.monomial(diff) + LaurentPoly.monomial(-diff)


def q1_polynomial(mu: MuVector) -> LaurentPoly:
    q1 = LaurentPoly.constant(3)
    for diff in mu.axis_differences():
        q1 = q1 + _axis_sum(diff)
    return q1


def q2_polynomial(cube: WeightCube) -> LaurentPoly:
    q2 = LaurentPoly()
    for _, w in cube.vertices:
        q2 = q2 + LaurentPoly.monomial(w, 2)
    return q2


def hilbert_series_wp(mu: MuVector) -> HilbertSeries:
    """Hilbert series of the format: (1 - Q1 t^l + Q2 t^l - Q1 t^2l + t^3l) / prod(1 - t^w)"""
    cube = cube_weights(mu)
    l = mu.socle_degree
    q1 = q1_polynomial(mu)
    q2 = q2_polynomial(cube)
    numerator = (LaurentPoly.constant(1) - q1.shift(l) + q2.shift(l)
                 - q1.shift(2 * l) + LaurentPoly.monomial(3 * l))
    if numerator.min_exponent() < 0:
        raise FormulaInconsistencyError(
            f"formula inconsistency: numerator has exponent {numerator.min_exponent()} for mu={mu}")
    assert numerator.reversed(3 * l) == numerator, "Gorenstein numerator must be palindromic"
    return HilbertSeries(numerator, CyclotomicProduct(tuple(w for _, w in cube.vertices)))


def cube_equations(cube: WeightCube) -> List[CubeEquation]:
    """The 6 face minors and 3 differences of space-diagonal products"""
    w = cube.weights
    equations = []

    def add(lhs, rhs, kind):
        degree = w[lhs[0]] + w[lhs[1]]
        assert degree == w[rhs[0]] + w[rhs[1]]
        equations.append(CubeEquation(lhs, rhs, degree, kind))

    for i in (1, 2):
        add((vertex_label(i, 1, 1), vertex_label(i, 2, 2)),
            (vertex_label(i, 1, 2), vertex_label(i, 2, 1)), f"face a{i}")
    for j in (1, 2):
        add((vertex_label(1, j, 1), vertex_label(2, j, 2)),
            (vertex_label(1, j, 2), vertex_label(2, j, 1)), f"face b{j}")
    for k in (1, 2):
        add((vertex_label(1, 1, k), vertex_label(2, 2, k)),
            (vertex_label(1, 2, k), vertex_label(2, 1, k)), f"face c{k}")

    diagonals = [("X111", "X222"), ("X112", "X221"), ("X121", "X212"), ("X211", "X122")]
    for other in diagonals[1:]:
        add(diagonals[0], other, "diagonal")
    return equations


def degree_formula(mu: MuVector) -> Fraction:
    """Leading coefficient D^3 of the format, closed form in l and the axis differences"""
    l = mu.socle_degree
    diffs = mu.axis_differences()
    s2 = sum(d ** 2 for d in diffs)
    s4 = sum(d ** 4 for d in diffs)
    p = diffs[0] ** 2 * diffs[1] ** 2 + diffs[0] ** 2 * diffs[2] ** 2 + diffs[1] ** 2 * diffs[2] ** 2
    leading = Fraction(9 * l ** 4 - 6 * l ** 2 * s2 - 3 * s4 + 6 * p, 24)
    return leading / prod(w for _, w in cube_weights(mu).vertices)
