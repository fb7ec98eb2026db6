"""
P1 Cube - Command Line
Series, construction reports, candidate search, model verification and
calibration from the shell

Examples:
    python cube_cli.py hilbert --mu 0,1,0,1,1,2 --order 12
    python cube_cli.py analyze --mu 0,1,0,1,1,2 --section 4@X222
    python cube_cli.py analyze --model mi4.json --n 1
    python cube_cli.py search --index 3..3
    python cube_cli.py verify-model models/mi1.json --n 1..5
    python cube_cli.py calibrate --max-order 20
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from construction import GENERIC, BuildRecipe, Section, build, invariants, toric_obstruction
from format_cube import (
    VERTEX_LABELS, MuVector, cube_from_weights, cube_weights, degree_formula, hilbert_series_wp
)
from model_config import (
    ConfigLoader, ModelLoader, ModelSpec, SearchConfig, get_search_config, reload_search_config,
    set_search_config
)
from orbifold_analysis import OrbifoldPoint, SurfaceAnalyzer
from records import (
    CalibrationCache, CandidateDatabase, ReportBundle, candidates_bundle,
    describe_contribution, frame_bundle
)
from rr_engine import Calibrator, calibrate
from search import enumerate_candidates, adjunction_violations, status_counts, index_report, verify_model
from series_algebra import P1CubeError, expand, format_rational

logger = logging.getLogger(__name__)

BANNER = "=" * 60


def banner(title: str):
    print("\n" + BANNER)
    print(title)
    print(BANNER)


def emit(bundle: ReportBundle, lines: bool):
    if lines:
        for line in bundle.lines():
            print(line)
    else:
        print(bundle.table())


# ---------------------------------------------------------------------------
# Argument parsing helpers
# ---------------------------------------------------------------------------

def parse_int_list(text: str) -> List[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def parse_range(text: str) -> Tuple[int, int]:
    """'3..7' or '3'"""
    if ".." in text:
        low, high = text.split("..", 1)
        return int(low), int(high)
    return int(text), int(text)


def parse_section(text: str) -> Section:
    """'4@X222' or '4' for a generic section"""
    if "@" in text:
        degree, target = text.split("@", 1)
        return Section(int(degree), target)
    return Section(int(text), GENERIC)


def cube_from_args(args):
    if args.mu and args.cube:
        raise P1CubeError("give either --mu or --cube, not both")
    if args.cube:
        weights = parse_int_list(args.cube)
        if len(weights) != 8:
            raise P1CubeError(f"--cube needs 8 weights in the order {','.join(VERTEX_LABELS)}")
        return cube_from_weights(dict(zip(VERTEX_LABELS, weights)))
    if args.mu:
        return cube_weights(MuVector.of(parse_int_list(args.mu)))
    raise P1CubeError("give --mu or --cube")


def recipe_from_args(args) -> Tuple[BuildRecipe, str]:
    if args.model:
        model = ModelLoader.load(args.model)
        n = model.first_n if args.n is None else args.n
        return model.recipe(n), f"{model.name} n={n} r={model.r_value(n)}"
    cube = cube_from_args(args)
    recipe = BuildRecipe(cube, tuple(parse_int_list(args.cones or "")),
                         tuple(parse_section(s) for s in args.section or []))
    return recipe, str(recipe)


def calibration_table(cache_path: Optional[str]):
    """Cached table when present, else an empty one that the calibrator fills"""
    if not cache_path:
        return None
    table = CalibrationCache(cache_path).load()
    if table is None:
        logger.info("no usable calibration cache at %s, calibrating from scratch", cache_path)
    return table


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_hilbert(args) -> int:
    cube = cube_from_args(args)
    series = hilbert_series_wp(cube.mu)
    banner(f"HILBERT SERIES OF {cube}")
    print(f"  numerator:   {series.numerator}")
    print(f"  denominator: {series.denominator}")
    print(f"  l = {cube.socle_degree}")
    print(f"  D^3 = {format_rational(degree_formula(cube.mu))}")
    coefficients = expand(series, args.order)
    print(f"  h0(n), n = 0..{args.order}: " + ", ".join(format_rational(c) for c in coefficients))
    return 0


def cmd_analyze(args) -> int:
    recipe, title = recipe_from_args(args)
    variety = build(recipe)
    report = invariants(variety)
    analyzer = SurfaceAnalyzer(variety)

    banner(f"SURFACE {title}")
    print(f"  ambient: {variety.describe_ambient()}")
    print(f"  I = {report.fano_index}, adjunction number = {variety.adjunction_number}")
    print(f"  D^2 = {format_rational(report.dsq)}")
    print(f"  -K^2 = {format_rational(report.minus_k_squared)}")
    print(f"  h0(-K) = {report.h0}")
    if toric_obstruction(report):
        print("  toric degeneration obstructed")
    print(f"  wellformed: {'yes' if analyzer.wellformed() else 'no'}")

    print("\nSINGULAR STRATA:")
    strata = analyzer.strata()
    if not strata:
        print("  none")
    for stratum in strata:
        components = ", ".join(f"{c.label} (dim {c.dimension})" for c in stratum.components) or "empty"
        print(f"  order {stratum.order}: dimension {stratum.dimension}: {components}")

    result = analyzer.basket()
    print("\nBASKET:")
    print(f"  {result.basket}")
    if result.basket.canonical() != result.basket:
        print(f"  canonical form: {result.basket.canonical()}")
    for flag in result.flags:
        print(f"  [FLAG] {flag}")

    degrees = [s.degree for s in recipe.sections if s.is_quasilinear]
    degree = args.degree or max(degrees, default=report.fano_index)
    print(f"\nBASE LOCUS OF |O({degree})|:")
    locus = analyzer.base_locus(degree)
    for component in locus:
        print(f"  {component.label} (dim {component.dimension})")
    if not locus:
        print("  empty")

    summary = analyzer.quasismooth_summary(degree)
    print("\nQUASISMOOTHNESS:")
    print(f"  certified at: {', '.join(summary.certified) or 'none'}")
    if summary.unresolved:
        print(f"  unresolved at: {', '.join(summary.unresolved)}")
    if summary.external:
        print(f"  needs external certification: {', '.join(summary.external)}")
    print("\n" + BANNER + "\n")
    return 0


def _progress(done: int, total: int):
    if done == total or done % max(1, total // 20) == 0:
        print(f"  Progress: {done}/{total}")


def search_config_from_args(args) -> SearchConfig:
    config = reload_search_config(args.config) if args.config else get_search_config()
    overrides = config.to_dict()
    if args.index:
        overrides['index_min'], overrides['index_max'] = parse_range(args.index)
    for name in ('adjunction_bound', 'max_cones', 'workers'):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    config = SearchConfig.from_dict(overrides)
    set_search_config(config)
    return config


def cmd_search(args) -> int:
    config = search_config_from_args(args)
    errors = config.validate()
    if errors:
        print(f"[ERROR] Search window is invalid with {len(errors)} error(s):")
        for error in errors:
            print(f"   - {error}")
        return 2

    banner(f"SEARCH: I in {config.index_min}..{config.index_max}, adjunction <= {config.adjunction_bound}")
    records, stats = enumerate_candidates(config, progress=None if args.lines else _progress)
    print(f"\n{len(records)} candidates")
    print(f"  examined {stats.examined}, not wellformed {stats.not_wellformed}, "
          f"no basket {stats.no_basket}, duplicates {stats.duplicates}, errors {stats.errors}")

    emit(candidates_bundle(records), args.lines)
    if not args.lines:
        print("\nPER INDEX:")
        print(index_report(records, config).to_string(index=False))
        print("\nSTATUS:")
        for status, count in sorted(status_counts(records).items()):
            print(f"  {status}: {count}")
        for record in adjunction_violations(records):
            print(f"  [WARN] I={record.index} has adjunction number {record.adjunction_number}, "
                  f"expected {6 * record.index}")

    if args.db:
        added, known = CandidateDatabase(args.db).merge(records)
        print(f"[OK] {args.db}: {added} added, {known} already present")
    return 0


def cmd_verify_model(args) -> int:
    model = ModelLoader.load(args.model)
    first, last = parse_range(args.n) if args.n else (model.first_n, model.first_n + 4)
    calibrator = Calibrator(1, calibration_table(args.cache))
    report = verify_model(model, last - first + 1, calibrator, start=first)
    if args.cache:
        CalibrationCache(args.cache).save(calibrator.table)

    if not args.lines:
        banner(f"VERIFY {model.name}: n = {first}..{last}")
    emit(frame_bundle(model.name, report.to_frame()), args.lines)
    for check in report.failures():
        for problem in check.problems:
            print(f"  n={check.n}: {problem}")
    if report.passed:
        print(f"[OK] {model.name}: all {len(report.instances)} instances pass")
        return 0
    print(f"[ERROR] {model.name}: {len(report.failures())} of {len(report.instances)} instances fail")
    return 1


def isolated_types(max_order: int) -> List[OrbifoldPoint]:
    return sorted({OrbifoldPoint(r, 1, b).canonical()
                   for r in range(2, max_order + 1) for b in range(1, r)
                   if OrbifoldPoint(r, 1, b).is_isolated})


def cmd_calibrate(args) -> int:
    cache = CalibrationCache(args.cache)
    table = calibrate(isolated_types(args.max_order), args.max_order, cache.load())
    cache.save(table)
    banner(f"CALIBRATION UP TO ORDER {args.max_order}")
    for point in table.types():
        print(f"  {describe_contribution(table.entries[point])}")
        if args.verbose:
            for note in table.provenance.get(point, []):
                print(f"      {note}")
    print(f"[OK] {len(table)} types written to {args.cache}")
    return 0


def show_model(model: ModelSpec):
    banner(f"MODEL {model.name}")
    print(f"  r = {model.step}*n + {model.offset}, n >= {model.first_n}")
    for name, text in model.parameters.items():
        print(f"  {name} = {text}")
    if model.mu is not None:
        print(f"  mu = ({', '.join(model.mu)})")
    else:
        print("  cube = " + ", ".join(f"{k}={v}" for k, v in model.cube.items()))
    if model.cones:
        print(f"  cones: {', '.join(model.cones)}")
    for section in model.sections:
        print(f"  section of degree {section.degree} at {section.target}")
    expected = model.expected
    print("\nEXPECTED:")
    if expected.minus_k_squared is not None:
        print(f"  -K^2 = {expected.minus_k_squared}")
    if expected.h0 is not None:
        print(f"  h0(-K) = {expected.h0}")
    for entry in expected.basket:
        print(f"  {entry.multiplicity} x 1/{entry.order}({', '.join(entry.weights)})")
    print(f"  basket route: {expected.basket_route}")
    if model.notes:
        print(f"\n  {model.notes}")
    print("\n" + BANNER + "\n")


def cmd_show_model(args) -> int:
    show_model(ModelLoader.load(args.model))
    return 0


def cmd_validate_model(args) -> int:
    """Validate a model file the way a config file is validated"""
    print(f"\nValidating {args.model}...")
    path = Path(args.model)
    if not path.exists() and (ModelLoader.MODELS_DIR / args.model).exists():
        path = ModelLoader.MODELS_DIR / args.model
    if not path.exists():
        print(f"[ERROR] {args.model} not found")
        return 1
    try:
        with open(path, 'r') as f:
            data = json.load(f)
        print("[OK] JSON syntax is valid")
    except json.JSONDecodeError as e:
        print(f"[ERROR] JSON syntax error: {e}")
        return 1

    try:
        model = ModelSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        print(f"[ERROR] malformed model: {e}")
        return 1
    errors = model.validate()
    if errors:
        print(f"[ERROR] Validation failed with {len(errors)} error(s):")
        for error in errors:
            print(f"   - {error}")
        return 1
    try:
        model.recipe(model.first_n)
    except P1CubeError as e:
        print(f"[ERROR] {e}")
        return 1
    print("[OK] Model is valid")
    show_model(model)
    return 0


def cmd_init_config(args) -> int:
    ConfigLoader.save_default(args.config)
    print(f"[OK] Search window reset to defaults: {args.config}")
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _add_recipe_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--mu', help='six comma-separated integers a1,a2,b1,b2,c1,c2')
    parser.add_argument('--cube', help=f"eight weights in the order {','.join(VERTEX_LABELS)}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Weighted P1 x P1 x P1 del Pezzo surfaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Examples:", 1)[1],
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='debug logging')
    commands = parser.add_subparsers(dest='command', required=True)

    hilbert = commands.add_parser('hilbert', help='Hilbert series of the format')
    _add_recipe_arguments(hilbert)
    hilbert.add_argument('--order', type=int, default=20, help='expansion order (default: 20)')
    hilbert.set_defaults(func=cmd_hilbert)

    for name in ('construct', 'analyze'):
        analyze = commands.add_parser(name, help='build a surface and report its invariants and basket')
        _add_recipe_arguments(analyze)
        analyze.add_argument('--cones', help='comma-separated cone weights')
        analyze.add_argument('--section', action='append',
                             help="section 'degree@vertex', or 'degree' for a generic one (repeatable)")
        analyze.add_argument('--model', help='model file instead of --mu/--cube')
        analyze.add_argument('--n', type=int, help='family member (default: the first valid n)')
        analyze.add_argument('--degree', type=int, help='degree of the linear system for the base locus')
        analyze.set_defaults(func=cmd_analyze)

    search = commands.add_parser('search', help='enumerate del Pezzo candidates')
    search.add_argument('--config', help='search window file (default: search_config.json)')
    search.add_argument('--index', help="index range 'lo..hi'")
    search.add_argument('--adjunction', dest='adjunction_bound', type=int, help='adjunction number bound')
    search.add_argument('--max-cones', dest='max_cones', type=int)
    search.add_argument('--workers', type=int)
    search.add_argument('--db', help='candidate database to merge into')
    search.add_argument('--lines', action='store_true', help='one key=value record per line')
    search.set_defaults(func=cmd_search)

    verify = commands.add_parser('verify-model', help='check a model file member by member')
    verify.add_argument('model')
    verify.add_argument('--n', help="range 'lo..hi' (default: five members)")
    verify.add_argument('--cache', help='calibration cache to read and update')
    verify.add_argument('--lines', action='store_true', help='one key=value record per line')
    verify.set_defaults(func=cmd_verify_model)

    cal = commands.add_parser('calibrate', help='calibrate every isolated type up to an order')
    cal.add_argument('--max-order', type=int, default=20)
    cal.add_argument('--cache', default='calibration.jsonl')
    cal.set_defaults(func=cmd_calibrate)

    show = commands.add_parser('show-model', help='print a model file')
    show.add_argument('model')
    show.set_defaults(func=cmd_show_model)

    validate = commands.add_parser('validate-model', help='validate a model file')
    validate.add_argument('model')
    validate.set_defaults(func=cmd_validate_model)

    init = commands.add_parser('init-config', help='write the default search window')
    init.add_argument('config', nargs='?', default=ConfigLoader.DEFAULT_CONFIG_PATH)
    init.set_defaults(func=cmd_init_config)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except P1CubeError as e:
        print(f"[ERROR] {e}")
        return 1
    except ValueError as e:
        print(f"[ERROR] invalid argument: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
