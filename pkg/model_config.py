"""
P1 Cube - Configuration Module
Handles loading, validation and instantiation of model files (models/*.json)
and of the search window (search_config.json)

Usage as CLI (through cube_cli.py):
    python cube_cli.py show-model models/mi4.json      # Show a model
    python cube_cli.py validate-model models/mi4.json  # Validate a model file
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from sympy import Integer, Symbol
from sympy.parsing.sympy_parser import parse_expr

from construction import GENERIC, BuildRecipe, Section
from format_cube import VERTEX_LABELS, MuVector, cube_from_weights, cube_weights
from orbifold_analysis import Basket, OrbifoldPoint
from series_algebra import P1CubeError

logger = logging.getLogger(__name__)

BASKET_ROUTES = ("geometric", "rr")


class ConfigError(P1CubeError):
    pass


class ModelInstantiationError(P1CubeError):
    pass


# ---------------------------------------------------------------------------
# Search window
# ---------------------------------------------------------------------------

@dataclass
class SearchConfig:
    """Bounds of the candidate search"""
    index_min: int = 1
    index_max: int = 16
    adjunction_bound: int = 96
    max_cones: int = 2
    max_multiplicity: int = 12
    row_cap: int = 1500
    workers: int = 1

    @classmethod
    def from_dict(cls, config_dict: dict) -> 'SearchConfig':
        defaults = cls()
        return cls(**{name: int(config_dict.get(name, getattr(defaults, name)))
                      for name in defaults.to_dict()})

    def to_dict(self) -> dict:
        return {
            'index_min': self.index_min,
            'index_max': self.index_max,
            'adjunction_bound': self.adjunction_bound,
            'max_cones': self.max_cones,
            'max_multiplicity': self.max_multiplicity,
            'row_cap': self.row_cap,
            'workers': self.workers,
        }

    def validate(self) -> List[str]:
        """Validate configuration and return list of errors"""
        errors = []
        if self.index_min < 1:
            errors.append("index_min: must be >= 1")
        if self.index_max < self.index_min:
            errors.append(f"index_max: {self.index_max} is below index_min {self.index_min}")
        if self.adjunction_bound < 8 + self.index_min:
            errors.append(f"adjunction_bound: must be at least 8 + index_min = {8 + self.index_min}")
        if self.max_cones < 0:
            errors.append("max_cones: cannot be negative")
        if self.max_multiplicity < 1:
            errors.append("max_multiplicity: must be >= 1")
        if self.row_cap < 1:
            errors.append("row_cap: must be >= 1")
        if self.workers < 1:
            errors.append("workers: must be >= 1")
        return errors

    @property
    def indices(self) -> range:
        return range(self.index_min, self.index_max + 1)


class ConfigLoader:
    """Loads the search window from search_config.json"""

    DEFAULT_CONFIG_PATH = "search_config.json"

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> SearchConfig:
        """Load configuration from file, falling back to defaults if not found"""
        if config_path is None:
            config_path = cls.DEFAULT_CONFIG_PATH

        config_file = Path(config_path)
        if not config_file.exists():
            return SearchConfig()

        try:
            with open(config_file, 'r') as f:
                config = SearchConfig.from_dict(json.load(f))
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            logger.warning("error loading %s: %s; using defaults", config_path, e)
            return SearchConfig()

        errors = config.validate()
        if errors:
            logger.warning("validation errors in %s: %s; using defaults", config_path, "; ".join(errors))
            return SearchConfig()
        return config

    @classmethod
    def save_default(cls, config_path: Optional[str] = None):
        """Save default configuration to file"""
        if config_path is None:
            config_path = cls.DEFAULT_CONFIG_PATH
        with open(config_path, 'w') as f:
            json.dump(SearchConfig().to_dict(), f, indent=2)


_global_config: Optional[SearchConfig] = None


def get_search_config() -> SearchConfig:
    """Get the global search configuration"""
    global _global_config
    if _global_config is None:
        _global_config = ConfigLoader.load()
    return _global_config


def reload_search_config(config_path: Optional[str] = None) -> SearchConfig:
    global _global_config
    _global_config = ConfigLoader.load(config_path)
    return _global_config


def set_search_config(config: SearchConfig):
    """Set the global configuration programmatically"""
    global _global_config
    _global_config = config


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------

R = Symbol('r')


def _parse(text: str, names: Dict[str, object]):
    return parse_expr(str(text), local_dict=dict(names), evaluate=True)


@dataclass
class SectionSpec:
    degree: str
    target: str = GENERIC


@dataclass
class BasketEntrySpec:
    """k x 1/order(a,b) with order and weights given as expressions"""
    order: str
    weights: List[str]
    multiplicity: int = 1


@dataclass
class ExpectedSpec:
    minus_k_squared: Optional[str] = None
    h0: Optional[str] = None
    basket: List[BasketEntrySpec] = field(default_factory=list)
    basket_route: str = "geometric"


@dataclass
class ModelSpec:
    """A family of surfaces indexed by n with r = step*n + offset"""
    name: str
    step: int
    offset: int
    first_n: int = 0
    parameters: Dict[str, str] = field(default_factory=dict)
    mu: Optional[List[str]] = None
    cube: Optional[Dict[str, str]] = None
    cones: List[str] = field(default_factory=list)
    sections: List[SectionSpec] = field(default_factory=list)
    expected: ExpectedSpec = field(default_factory=ExpectedSpec)
    notes: str = ""

    @classmethod
    def from_dict(cls, config_dict: dict) -> 'ModelSpec':
        """Create ModelSpec from dictionary"""
        law = config_dict.get('law', {})
        expected = config_dict.get('expected', {})
        return cls(
            name=config_dict.get('name', ''),
            step=int(law.get('step', 1)),
            offset=int(law.get('offset', 0)),
            first_n=int(config_dict.get('first_n', 0)),
            parameters={k: str(v) for k, v in config_dict.get('parameters', {}).items()},
            mu=[str(x) for x in config_dict['mu']] if 'mu' in config_dict else None,
            cube={k: str(v) for k, v in config_dict['cube'].items()} if 'cube' in config_dict else None,
            cones=[str(c) for c in config_dict.get('cones', [])],
            sections=[SectionSpec(str(s['degree']), s.get('target', GENERIC))
                      for s in config_dict.get('sections', [])],
            expected=ExpectedSpec(
                minus_k_squared=expected.get('minus_k_squared'),
                h0=str(expected['h0']) if 'h0' in expected else None,
                basket=[BasketEntrySpec(str(e['order']), [str(w) for w in e['weights']],
                                        int(e.get('multiplicity', 1)))
                        for e in expected.get('basket', [])],
                basket_route=expected.get('basket_route', 'geometric'),
            ),
            notes=config_dict.get('notes', ''),
        )

    def to_dict(self) -> dict:
        """Convert ModelSpec to dictionary"""
        result = {
            'name': self.name,
            'law': {'step': self.step, 'offset': self.offset},
            'first_n': self.first_n,
            'parameters': dict(self.parameters),
        }
        if self.mu is not None:
            result['mu'] = list(self.mu)
        if self.cube is not None:
            result['cube'] = dict(self.cube)
        result['cones'] = list(self.cones)
        result['sections'] = [{'degree': s.degree, 'target': s.target} for s in self.sections]
        expected: dict = {
            'basket': [{'order': e.order, 'weights': list(e.weights), 'multiplicity': e.multiplicity}
                       for e in self.expected.basket],
            'basket_route': self.expected.basket_route,
        }
        if self.expected.minus_k_squared is not None:
            expected['minus_k_squared'] = self.expected.minus_k_squared
        if self.expected.h0 is not None:
            expected['h0'] = self.expected.h0
        result['expected'] = expected
        if self.notes:
            result['notes'] = self.notes
        return result

    def _expressions(self) -> Dict[str, List[str]]:
        groups = {
            'mu': list(self.mu or []),
            'cube': list((self.cube or {}).values()),
            'cones': list(self.cones),
            'sections': [s.degree for s in self.sections],
            'expected.basket': [x for e in self.expected.basket for x in [e.order, *e.weights]],
        }
        if self.expected.minus_k_squared is not None:
            groups['expected.minus_k_squared'] = [self.expected.minus_k_squared]
        if self.expected.h0 is not None:
            groups['expected.h0'] = [self.expected.h0]
        return groups

    def validate(self) -> List[str]:
        """Validate the model and return list of "field: message" errors"""
        errors = []
        if not self.name:
            errors.append("name: cannot be empty")
        if self.step < 1:
            errors.append(f"law.step: must be >= 1, got {self.step}")
        if (self.mu is None) == (self.cube is None):
            errors.append("mu/cube: exactly one of mu or cube must be given")
        if self.mu is not None and len(self.mu) != 6:
            errors.append(f"mu: needs 6 entries, got {len(self.mu)}")
        if self.cube is not None and sorted(self.cube) != sorted(VERTEX_LABELS):
            errors.append(f"cube: keys must be {', '.join(VERTEX_LABELS)}")
        for i, section in enumerate(self.sections):
            if section.target != GENERIC and section.target not in VERTEX_LABELS:
                errors.append(f"sections[{i}].target: unknown vertex {section.target}")
        if self.expected.basket_route not in BASKET_ROUTES:
            errors.append(f"expected.basket_route: must be one of {', '.join(BASKET_ROUTES)}")
        for entry in self.expected.basket:
            if len(entry.weights) != 2:
                errors.append(f"expected.basket: 1/{entry.order}(...) needs two weights")
            if entry.multiplicity < 1:
                errors.append("expected.basket: multiplicity must be >= 1")

        names: Dict[str, object] = {'r': R}
        for name, text in self.parameters.items():
            try:
                names[name] = _parse(text, names)
            except Exception as e:
                errors.append(f"parameters.{name}: cannot parse {text!r} ({e})")
                names[name] = Symbol(name)
        for group, texts in self._expressions().items():
            for text in texts:
                try:
                    value = _parse(text, names)
                except Exception as e:
                    errors.append(f"{group}: cannot parse {text!r} ({e})")
                    continue
                unknown = sorted(str(s) for s in value.free_symbols if s != R)
                if unknown:
                    errors.append(f"{group}: unknown symbols {', '.join(unknown)} in {text!r}")
        return errors

    # -- instantiation -----------------------------------------------------

    def r_value(self, n: int) -> int:
        return self.step * n + self.offset

    def environment(self, n: int) -> Dict[str, object]:
        names: Dict[str, object] = {'r': Integer(self.r_value(n))}
        for name, text in self.parameters.items():
            names[name] = _parse(text, names)
        return names

    def _integer(self, text: str, names: Dict[str, object], n: int, where: str) -> int:
        value = _parse(text, names)
        if not value.is_Integer:
            raise ModelInstantiationError(f"model instantiation error at n={n}: {where} = {value} "
                                          f"is not an integer")
        return int(value)

    def _positive(self, text: str, names: Dict[str, object], n: int, where: str) -> int:
        value = self._integer(text, names, n, where)
        if value < 1:
            raise ModelInstantiationError(f"model instantiation error at n={n}: {where} = {value} "
                                          f"is not positive")
        return value

    def recipe(self, n: int) -> BuildRecipe:
        names = self.environment(n)
        if self.mu is not None:
            mu = MuVector.of([self._integer(x, names, n, f"mu[{i}]") for i, x in enumerate(self.mu)])
            cube = cube_weights(mu)
        else:
            cube = cube_from_weights({label: self._positive(x, names, n, label)
                                      for label, x in self.cube.items()})
        cones = tuple(self._positive(c, names, n, f"cones[{i}]") for i, c in enumerate(self.cones))
        sections = tuple(Section(self._positive(s.degree, names, n, f"sections[{i}]"), s.target)
                         for i, s in enumerate(self.sections))
        return BuildRecipe(cube, cones, sections)

    def expected_minus_k_squared(self, n: int) -> Optional[Fraction]:
        if self.expected.minus_k_squared is None:
            return None
        value = _parse(self.expected.minus_k_squared, self.environment(n))
        return Fraction(int(value.p), int(value.q))

    def expected_h0(self, n: int) -> Optional[int]:
        if self.expected.h0 is None:
            return None
        return self._integer(self.expected.h0, self.environment(n), n, "expected.h0")

    def expected_basket(self, n: int) -> Basket:
        names = self.environment(n)
        counts: Dict[OrbifoldPoint, int] = {}
        for entry in self.expected.basket:
            order = self._positive(entry.order, names, n, "basket order")
            if order == 1:
                continue
            a, b = (self._integer(w, names, n, "basket weight") for w in entry.weights)
            point = OrbifoldPoint(order, a, b)
            counts[point] = counts.get(point, 0) + entry.multiplicity
        return Basket.from_counts(counts)

    def instances(self, count: int) -> range:
        return range(self.first_n, self.first_n + count)


class ModelLoader:
    """Loads model files; unlike the search window there is no default to fall back on"""

    MODELS_DIR = Path(__file__).parent / "models"

    @classmethod
    def load(cls, path: str) -> ModelSpec:
        model_file = Path(path)
        if not model_file.exists() and (cls.MODELS_DIR / path).exists():
            model_file = cls.MODELS_DIR / path
        if not model_file.exists():
            raise ConfigError(f"model file {path} not found")
        try:
            with open(model_file, 'r') as f:
                model = ModelSpec.from_dict(json.load(f))
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON syntax error in {path}: {e}") from e
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed model {path}: {e}") from e
        errors = model.validate()
        if errors:
            raise ConfigError(f"invalid model {path}: " + "; ".join(errors))
        return model

    @classmethod
    def bundled(cls) -> List[Path]:
        return sorted(cls.MODELS_DIR.glob("*.json"))

    @staticmethod
    def save(model: ModelSpec, path: str):
        with open(path, 'w') as f:
            json.dump(model.to_dict(), f, indent=2)
