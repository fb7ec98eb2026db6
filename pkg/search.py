"""
P1 Cube - Candidate Search
Enumerates quasilinear sections of projective cones over the weighted
P1 x P1 x P1 format inside an index range and adjunction bound, keeps the
candidates whose Hilbert series admits a rigid basket, and checks bundled
model files instance by instance
"""

import logging
import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from construction import BuildRecipe, NotFanoError, PolarizedVariety, Section, build, invariants
from format_cube import VERTEX_LABELS, MuVector, cube_weights
from model_config import ModelSpec, SearchConfig
from orbifold_analysis import Basket, SurfaceAnalyzer, ambient_wellformed, polarizations
from rr_engine import (
    Calibrator, InconsistentInvariantsError, candidate_points_from_weights, match_basket,
    polarized_candidates, rr_consistent
)
from series_algebra import P1CubeError, expand, format_rational

logger = logging.getLogger(__name__)

PUBLISHED_COUNTS = [33, 18, 0, 0, 1, 0, 1, 1, 2, 1, 3, 1, 3, 5, 2, 5]

CANDIDATE = "candidate"
VERIFIED = "verified"
REFUTED = "refuted"


@dataclass
class CandidateRecord:
    """One surviving surface of the search"""
    mu: MuVector
    recipe: str
    ambient: List[int]
    index: int
    dsq: Fraction
    minus_k_squared: Fraction
    h0: int
    rr_baskets: List[Basket]
    geometric: Optional[Basket] = None
    flags: List[str] = field(default_factory=list)
    wellformed: bool = True
    obstructed: bool = False
    status: str = CANDIDATE
    prefix: Tuple[int, ...] = ()

    @property
    def adjunction_number(self) -> int:
        return sum(self.ambient) + self.index

    @property
    def key(self) -> tuple:
        baskets = tuple(sorted(str(b.canonical()) for b in self.rr_baskets))
        return (tuple(sorted(self.ambient)), self.index, self.prefix, baskets)

    def sort_key(self) -> tuple:
        return (self.index, sorted(self.ambient), self.mu.as_tuple(), self.recipe)

    def summary(self) -> Dict[str, object]:
        return {
            'I': self.index,
            'ambient': "P(" + ",".join(str(w) for w in sorted(self.ambient)) + ")",
            'adjunction': self.adjunction_number,
            '-K^2': format_rational(self.minus_k_squared),
            'h0': self.h0,
            'basket': str(self.rr_baskets[0].canonical()) if self.rr_baskets else "",
            'status': self.status,
        }


@dataclass
class SearchStats:
    examined: int = 0
    outside_window: int = 0
    not_wellformed: int = 0
    no_basket: int = 0
    errors: int = 0
    duplicates: int = 0

    def merge(self, other: 'SearchStats'):
        for name in self.__dataclass_fields__:
            setattr(self, name, getattr(self, name) + getattr(other, name))


# ---------------------------------------------------------------------------
# Enumeration of recipes
# ---------------------------------------------------------------------------

def canonical_mus(max_socle: int) -> Iterator[MuVector]:
    """mu = (0, d0, 0, d1, base, base + d2) with d0 <= d1 <= d2 and socle degree <= max_socle"""
    for base in range(1, max_socle // 2 + 1):
        budget = max_socle - 2 * base
        for d0 in range(0, budget + 1):
            for d1 in range(d0, budget - d0 + 1):
                for d2 in range(d1, budget - d0 - d1 + 1):
                    yield MuVector(0, d0, 0, d1, base, base + d2)


def _partitions(total: int, parts: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Nonincreasing tuples of `parts` positive integers summing to `total`"""
    if largest is None:
        largest = total
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total - parts + 1, largest), 0, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def recipes_for(mu: MuVector, config: SearchConfig) -> Iterator[BuildRecipe]:
    """Surface recipes over one cube: s quasilinear sections, s - 1 cones, I and adjunction in range"""
    cube = cube_weights(mu)
    socle = mu.socle_degree
    seen = set()
    for cones in range(config.max_cones + 1):
        for targets in combinations(VERTEX_LABELS, cones + 1):
            degrees = [cube.weight(t) for t in targets]
            for index in config.indices:
                # adjunction number = 3 l + 2 I for every surface recipe
                if 3 * socle + 2 * index > config.adjunction_bound:
                    continue
                cone_total = index - socle + sum(degrees)
                for cone_weights in _partitions(cone_total, cones):
                    ambient = sorted([w for label, w in cube.vertices if label not in targets]
                                     + list(cone_weights))
                    signature = (tuple(ambient), index, tuple(sorted(degrees)))
                    if signature in seen:
                        continue
                    seen.add(signature)
                    yield BuildRecipe(cube, tuple(cone_weights),
                                      tuple(Section(d, t) for d, t in zip(degrees, targets)))


# ---------------------------------------------------------------------------
# Evaluation of one recipe
# ---------------------------------------------------------------------------

_calibrator: Optional[Calibrator] = None


def _shared_calibrator(bound: int) -> Calibrator:
    """Per-process calibration table, grown as larger weights come up"""
    global _calibrator
    if _calibrator is None:
        _calibrator = Calibrator(bound)
    _calibrator.bound = max(_calibrator.bound, bound)
    return _calibrator


def rr_baskets(variety: PolarizedVariety, index: int, dsq: Fraction, calibrator: Calibrator,
               max_multiplicity: int = 12, row_cap: int = 1500) -> List[Basket]:
    calibrator.bound = max(calibrator.bound, max(variety.ambient_weights))
    candidates = polarized_candidates(candidate_points_from_weights(variety.ambient_weights), index)
    for point in candidates:
        calibrator.require(point)
    return match_basket(variety.series, index, dsq, candidates, calibrator.table,
                        max_multiplicity=max_multiplicity, row_cap=row_cap)


def classify_status(geometric, rr_solutions: Sequence[Basket], wellformed: bool) -> str:
    if geometric is None or not geometric.resolved:
        return CANDIDATE
    found = geometric.basket.canonical()
    if any(found == b.canonical() for b in rr_solutions):
        return VERIFIED if wellformed else CANDIDATE
    return REFUTED


def evaluate_recipe(recipe: BuildRecipe, config: SearchConfig, stats: SearchStats,
                    calibrator: Calibrator) -> Optional[CandidateRecord]:
    stats.examined += 1
    try:
        variety = build(recipe)
    except NotFanoError:
        stats.outside_window += 1
        return None
    if not ambient_wellformed(variety.ambient_weights):
        stats.not_wellformed += 1
        return None

    report = invariants(variety)
    if not report.is_del_pezzo_candidate:
        stats.no_basket += 1
        return None
    try:
        solutions = rr_baskets(variety, report.fano_index, report.dsq, calibrator,
                               config.max_multiplicity, config.row_cap)
    except InconsistentInvariantsError as e:
        logger.debug("no rigid basket for %s: %s", recipe, e)
        solutions = []
    if not solutions:
        stats.no_basket += 1
        return None

    analyzer = SurfaceAnalyzer(variety)
    geometric = analyzer.basket()
    wellformed = analyzer.wellformed()
    top = 2 * max(variety.ambient_weights)
    return CandidateRecord(
        mu=recipe.cube.mu.canonical(),
        recipe=str(recipe),
        ambient=variety.ambient_weights,
        index=report.fano_index,
        dsq=report.dsq,
        minus_k_squared=report.minus_k_squared,
        h0=report.h0,
        rr_baskets=solutions,
        geometric=geometric.basket if geometric.resolved else None,
        flags=list(geometric.flags),
        wellformed=wellformed,
        obstructed=report.h0 == 0,
        status=classify_status(geometric, solutions, wellformed),
        prefix=tuple(int(c) for c in expand(variety.series, top)),
    )


def search_mu(mu: MuVector, config: SearchConfig) -> Tuple[List[CandidateRecord], SearchStats]:
    """All candidates over one canonical cube"""
    stats = SearchStats()
    calibrator = _shared_calibrator(max(cube_weights(mu).weight_list()))
    records = []
    for recipe in recipes_for(mu, config):
        try:
            record = evaluate_recipe(recipe, config, stats, calibrator)
        except P1CubeError as e:
            logger.debug("skipping %s: %s", recipe, e)
            stats.errors += 1
            continue
        if record is not None:
            records.append(record)
    return records, stats


def _search_mu_job(args):
    return search_mu(*args)


def enumerate_candidates(config: SearchConfig,
                         progress: Optional[Callable[[int, int], None]] = None
                         ) -> Tuple[List[CandidateRecord], SearchStats]:
    """Deduplicated candidates sorted by index, then ambient weights"""
    max_socle = (config.adjunction_bound - 2 * config.index_min) // 3
    mus = list(canonical_mus(max_socle))
    stats = SearchStats()
    found: List[CandidateRecord] = []

    jobs = [(mu, config) for mu in mus]
    if config.workers > 1:
        with multiprocessing.Pool(processes=config.workers) as pool:
            results = pool.imap(_search_mu_job, jobs)
            for i, (records, mu_stats) in enumerate(results, 1):
                found.extend(records)
                stats.merge(mu_stats)
                if progress:
                    progress(i, len(jobs))
    else:
        for i, job in enumerate(jobs, 1):
            records, mu_stats = _search_mu_job(job)
            found.extend(records)
            stats.merge(mu_stats)
            if progress:
                progress(i, len(jobs))

    unique: Dict[tuple, CandidateRecord] = {}
    for record in sorted(found, key=CandidateRecord.sort_key):
        if record.key in unique:
            stats.duplicates += 1
            continue
        unique[record.key] = record
    logger.info("search examined %d recipes over %d cubes, kept %d", stats.examined, len(mus), len(unique))
    return list(unique.values()), stats


# ---------------------------------------------------------------------------
# Reports over search output
# ---------------------------------------------------------------------------

def index_counts(records: Sequence[CandidateRecord], config: SearchConfig) -> np.ndarray:
    indices = np.array([r.index for r in records], dtype=int)
    counts = np.bincount(indices, minlength=config.index_max + 1)
    return counts[config.index_min:config.index_max + 1]


def index_report(records: Sequence[CandidateRecord], config: SearchConfig) -> pd.DataFrame:
    """Per-index counts against the published search summary"""
    found = index_counts(records, config)
    rows = []
    for offset, index in enumerate(config.indices):
        expected = PUBLISHED_COUNTS[index - 1] if index <= len(PUBLISHED_COUNTS) else None
        rows.append({
            'I': index,
            'found': int(found[offset]),
            'expected': expected,
            'diff': None if expected is None else int(found[offset]) - expected,
        })
    return pd.DataFrame(rows)


def adjunction_violations(records: Sequence[CandidateRecord]) -> List[CandidateRecord]:
    """Candidates of index >= 5 whose adjunction number is not 6I"""
    return [r for r in records if r.index >= 5 and r.adjunction_number != 6 * r.index]


def status_counts(records: Sequence[CandidateRecord]) -> Dict[str, int]:
    return dict(Counter(r.status for r in records))


# ---------------------------------------------------------------------------
# Model verification
# ---------------------------------------------------------------------------

@dataclass
class InstanceCheck:
    n: int
    r: int
    ambient: str = ""
    minus_k_squared: Optional[Fraction] = None
    h0: Optional[int] = None
    basket: Optional[Basket] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    problems: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.problems and all(self.checks.values())

    def row(self) -> Dict[str, object]:
        row = {'n': self.n, 'r': self.r, 'ambient': self.ambient,
               '-K^2': format_rational(self.minus_k_squared) if self.minus_k_squared is not None else "",
               'h0': self.h0, 'basket': str(self.basket) if self.basket is not None else ""}
        row.update({name: "ok" if ok else "FAIL" for name, ok in self.checks.items()})
        row['passed'] = self.passed
        return row


@dataclass
class ModelReport:
    model: str
    instances: List[InstanceCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.instances) and all(c.passed for c in self.instances)

    def failures(self) -> List[InstanceCheck]:
        return [c for c in self.instances if not c.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([c.row() for c in self.instances])


def polarized_baskets(basket: Basket, index: int) -> List[Basket]:
    """Every way of writing the basket types with a + b = index mod r"""
    choices = []
    for point, k in basket.entries:
        if (point.a + point.b - index) % point.r == 0:
            choices.append([(point, k)])
        else:
            choices.append([(p, k) for p in polarizations(point, index)])
    baskets = []
    for pick in product(*choices):
        counts: Counter = Counter()
        for point, k in pick:
            counts[point] += k
        baskets.append(Basket.from_counts(counts))
    return baskets


def check_instance(model: ModelSpec, n: int, calibrator: Calibrator) -> InstanceCheck:
    """Build one member of the family and compare it with the model file"""
    check = InstanceCheck(n=n, r=model.r_value(n))
    try:
        variety = build(model.recipe(n))
        expected_basket = model.expected_basket(n)
        expected_degree = model.expected_minus_k_squared(n)
        expected_h0 = model.expected_h0(n)
    except P1CubeError as e:
        check.problems.append(str(e))
        return check

    report = invariants(variety)
    analyzer = SurfaceAnalyzer(variety)
    check.ambient = variety.describe_ambient()
    check.minus_k_squared = report.minus_k_squared
    check.h0 = report.h0
    if expected_degree is not None:
        check.checks['degree'] = report.minus_k_squared == expected_degree
    if expected_h0 is not None:
        check.checks['plurigenus'] = report.h0 == expected_h0
    check.checks['wellformed'] = analyzer.wellformed()
    if not check.checks['wellformed']:
        return check

    calibrator.bound = max(calibrator.bound, max(variety.ambient_weights))
    try:
        candidates = polarized_baskets(expected_basket, report.fano_index)
        for basket in candidates:
            for point in basket.points():
                calibrator.require(point)
        check.checks['rr'] = any(rr_consistent(variety.series, report.fano_index, report.dsq,
                                               basket, calibrator.table) for basket in candidates)
        if model.expected.basket_route == "rr":
            solutions = rr_baskets(variety, report.fano_index, report.dsq, calibrator)
            check.basket = solutions[0] if len(solutions) == 1 else None
            check.checks['basket match'] = any(b.canonical() == expected_basket.canonical() for b in solutions)
        else:
            result = analyzer.basket()
            check.basket = result.basket
            check.problems.extend(result.flags)
            check.checks['basket match'] = result.basket.canonical() == expected_basket.canonical()
    except P1CubeError as e:
        check.problems.append(str(e))
    return check


def verify_model(model: ModelSpec, count: int = 5, calibrator: Optional[Calibrator] = None,
                 start: Optional[int] = None) -> ModelReport:
    """Check `count` members of a family, from `start` (default: the first valid n)"""
    calibrator = calibrator or Calibrator(1)
    report = ModelReport(model.name)
    first = model.first_n if start is None else start
    for n in range(first, first + count):
        check = check_instance(model, n, calibrator)
        level = logging.DEBUG if check.passed else logging.WARNING
        logger.log(level, "%s n=%d r=%d: %s", model.name, n, check.r,
                   "passed" if check.passed else "; ".join(
                       check.problems + [k for k, ok in check.checks.items() if not ok]))
        report.instances.append(check)
    return report
