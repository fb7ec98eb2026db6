"""
P1 Cube - Construction
Builds polarized varieties from a weight cube by projective cones and
quasilinear sections, and computes their numerical invariants
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from format_cube import VERTEX_LABELS, MuVector, WeightCube, cube_weights, hilbert_series_wp
from series_algebra import (
    CyclotomicProduct, HilbertSeries, LaurentPoly, P1CubeError, expand, residue_at_one
)

logger = logging.getLogger(__name__)

GENERIC = "generic"


class NotFanoError(P1CubeError):
    pass


class RecipeError(P1CubeError):
    pass


@dataclass(frozen=True)
class Section:
    """A hypersurface of the given degree, quasilinear in `target` or generic"""
    degree: int
    target: str = GENERIC

    @property
    def is_quasilinear(self) -> bool:
        return self.target != GENERIC

    def __str__(self) -> str:
        return f"H_{self.degree}@{self.target}"


@dataclass(frozen=True)
class BuildRecipe:
    """Cube plus cone weights plus sections"""
    cube: WeightCube
    cones: Tuple[int, ...] = ()
    sections: Tuple[Section, ...] = ()

    @classmethod
    def from_mu(cls, mu: MuVector, cones: Sequence[int] = (),
                sections: Sequence[Tuple[int, str]] = ()) -> 'BuildRecipe':
        return cls(cube_weights(mu), tuple(cones),
                   tuple(Section(int(d), target) for d, target in sections))

    @property
    def dimension(self) -> int:
        return 3 + len(self.cones) - len(self.sections)

    @property
    def canonical_degree(self) -> int:
        """kappa with K = O(-kappa)"""
        return self.cube.socle_degree + sum(self.cones) - sum(s.degree for s in self.sections)

    @property
    def targets(self) -> List[str]:
        return [s.target for s in self.sections if s.is_quasilinear]

    @property
    def is_quasilinear(self) -> bool:
        return all(s.is_quasilinear for s in self.sections)

    def validate(self) -> List[str]:
        """Return a list of recipe errors (empty when the recipe is consistent)"""
        errors = []
        weights = self.cube.weights
        for c in self.cones:
            if c < 1:
                errors.append(f"cone weight {c} must be positive")
        seen = set()
        for section in self.sections:
            if section.degree < 1:
                errors.append(f"section degree {section.degree} must be positive")
            if not section.is_quasilinear:
                continue
            if section.target not in weights:
                errors.append(f"section of degree {section.degree} has no matching vertex "
                              f"({section.target} is not a cube vertex)")
            elif weights[section.target] != section.degree:
                errors.append(f"section of degree {section.degree} has no matching vertex "
                              f"({section.target} has weight {weights[section.target]})")
            if section.target in seen:
                errors.append(f"vertex {section.target} is the target of more than one section")
            seen.add(section.target)
        return errors

    def __str__(self) -> str:
        parts = [f"mu={self.cube.mu}"]
        if self.cones:
            parts.append(f"cones={list(self.cones)}")
        if self.sections:
            parts.append("sections=[" + ", ".join(str(s) for s in self.sections) + "]")
        return " ".join(parts)


def section_at_weight(cube: WeightCube, degree: int, taken: Sequence[str] = ()) -> Section:
    """Quasilinear section of the given degree at the first free vertex of that weight"""
    for label in VERTEX_LABELS:
        if cube.weight(label) == degree and label not in taken:
            return Section(degree, label)
    raise RecipeError(f"section of degree {degree} has no matching vertex")


@dataclass(frozen=True)
class PolarizedVariety:
    recipe: BuildRecipe
    ambient: Tuple[Tuple[str, int], ...]
    series: HilbertSeries
    dim: int
    kappa: int

    @property
    def ambient_weights(self) -> List[int]:
        return sorted(w for _, w in self.ambient)

    @property
    def weights_by_label(self) -> Dict[str, int]:
        return dict(self.ambient)

    @property
    def fano_index(self) -> int:
        return self.kappa

    @property
    def adjunction_number(self) -> int:
        return sum(self.ambient_weights) + self.kappa

    def describe_ambient(self) -> str:
        return "P(" + ",".join(str(w) for w in self.ambient_weights) + ")"


def cone_label(index: int) -> str:
    return f"C{index}"


def build(recipe: BuildRecipe, surface: bool = True) -> PolarizedVariety:
    """Apply cones and sections to the format; surface=False allows other dimensions"""
    errors = recipe.validate()
    if errors:
        raise RecipeError("; ".join(errors))

    if surface and recipe.dimension != 2:
        raise RecipeError(f"dimension {recipe.dimension} recipe where a surface was requested")
    if recipe.dimension < 1:
        raise RecipeError(f"dimension {recipe.dimension} is not a projective variety")

    kappa = recipe.canonical_degree
    if kappa <= 0:
        raise NotFanoError(f"not Fano: K = O({-kappa}) for {recipe}")

    targets = set(recipe.targets)
    ambient = [(label, w) for label, w in recipe.cube.vertices if label not in targets]
    ambient += [(cone_label(i), c) for i, c in enumerate(recipe.cones, start=1)]

    # quasilinear sections cancel the eliminated vertex factor; generic ones stay in the numerator
    wp = hilbert_series_wp(recipe.cube.mu)
    numerator = wp.numerator
    for section in recipe.sections:
        if not section.is_quasilinear:
            numerator = numerator * LaurentPoly.one_minus(section.degree)
    series = HilbertSeries(numerator, CyclotomicProduct(tuple(w for _, w in ambient)))

    logger.debug("built %s in P(%s), kappa=%d", recipe,
                 ",".join(str(w) for _, w in ambient), kappa)
    return PolarizedVariety(recipe, tuple(ambient), series, recipe.dimension, kappa)


@dataclass(frozen=True)
class InvariantReport:
    fano_index: int
    dsq: Fraction
    minus_k_squared: Fraction
    h0: int
    coefficients: Tuple[Fraction, ...] = field(default=())

    @property
    def is_del_pezzo_candidate(self) -> bool:
        return self.minus_k_squared > 0


def invariants(variety: PolarizedVariety, terms: Optional[int] = None) -> InvariantReport:
    """D^2, -K^2 = I^2 D^2 and h0(-K) = coefficient of t^I"""
    if variety.dim != 2:
        raise RecipeError(f"invariants need a surface, got dimension {variety.dim}")
    kappa = variety.kappa
    dsq = residue_at_one(variety.series, 3)
    order = max(kappa, terms or 0, 10)
    coeffs = expand(variety.series, order)
    return InvariantReport(
        fano_index=kappa,
        dsq=dsq,
        minus_k_squared=kappa * kappa * dsq,
        h0=int(coeffs[kappa]),
        coefficients=tuple(coeffs),
    )


def toric_obstruction(report: InvariantReport) -> bool:
    """True when h0(-K) = 0, which rules out a qG-degeneration to a toric surface"""
    return report.h0 == 0
