"""Decoding of suite and library YAML nodes into geometric objects, plus the built-in library.

Every decoder validates the keys of its node and raises ConfigError naming the offending
key path (e.g. ``weyl.round.metric.diagonal``).
"""

import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from src.config_manager import ConfigManager
from src.errors import ConfigError, DimensionError, DomainError, ExpressionSyntaxError
from src.exprlang import Expression, Guard, parse, parse_guard
from src.geometry import MetricChart, flat_metric
from src.sampling import Box
from src.twistor import Seed, SurfacePatch, seeds_from_table
from src.weyl import WeylStructure

EVERYWHERE = Box((-math.inf,) * 4, (math.inf,) * 4)


def as_mapping(node: Any, path: str) -> Dict[str, Any]:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(node).__name__}")
    return node


def check_keys(node: Any, path: str, allowed: Iterable[str], required: Iterable[str] = ()) -> Dict[str, Any]:
    """Rejects unknown keys and missing required keys of a mapping node."""
    node = as_mapping(node, path)
    allowed = set(allowed) | set(required)
    for key in node:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")
    for key in required:
        if key not in node:
            raise ConfigError(f"{path}.{key}: required key missing")
    return node


def as_list(node: Any, path: str, length: Optional[int] = None) -> List[Any]:
    if not isinstance(node, list):
        raise ConfigError(f"{path}: expected a list, got {type(node).__name__}")
    if length is not None and len(node) != length:
        raise ConfigError(f"{path}: expected {length} entries, got {len(node)}")
    return node


def as_number(node: Any, path: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        try:
            return float(str(node))
        except ValueError:
            raise ConfigError(f"{path}: expected a number, got {node!r}") from None
    return float(node)


def parse_expression(source: Any, path: str) -> Expression:
    try:
        return parse(str(source))
    except ExpressionSyntaxError as e:
        raise ConfigError(f"{path}: {e.msg} at byte {e.offset} (expected {', '.join(e.expected) or 'end'})") from e


def parse_guard_node(source: Any, path: str) -> Guard:
    try:
        return parse_guard(None if source is None else str(source))
    except ExpressionSyntaxError as e:
        raise ConfigError(f"{path}: {e.msg} at byte {e.offset}") from e


def parse_box(node: Any, path: str, dim: Optional[int] = None) -> Box:
    """``{min: [...], max: [...]}`` → Box."""
    node = check_keys(node, path, (), ("min", "max"))
    lower = [as_number(x, f"{path}.min") for x in as_list(node["min"], f"{path}.min", dim)]
    upper = [as_number(x, f"{path}.max") for x in as_list(node["max"], f"{path}.max", len(lower))]
    try:
        return Box(tuple(lower), tuple(upper))
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e


def parse_coords(node: Any, path: str, dims: Sequence[int] = (2, 3, 4)) -> Tuple[str, ...]:
    coords = tuple(str(c) for c in as_list(node, path))
    if len(coords) not in dims:
        raise ConfigError(f"{path}: expected {' or '.join(map(str, dims))} coordinates, got {len(coords)}")
    if len(set(coords)) != len(coords):
        raise ConfigError(f"{path}: repeated coordinate names")
    return coords


def parse_orientation(node: Any, path: str) -> int:
    if node not in (1, -1):
        raise ConfigError(f"{path}: orientation must be 1 or -1")
    return int(node)


def _components(node: Dict[str, Any], path: str, coords: Tuple[str, ...]) -> Tuple[Tuple[Expression, ...], ...]:
    n = len(coords)
    if ("components" in node) == ("diagonal" in node):
        raise ConfigError(f"{path}: give exactly one of 'components' or 'diagonal'")
    if "diagonal" in node:
        diag = [parse_expression(e, f"{path}.diagonal[{i}]")
                for i, e in enumerate(as_list(node["diagonal"], f"{path}.diagonal", n))]
        zero = parse("0")
        return tuple(tuple(diag[i] if i == j else zero for j in range(n)) for i in range(n))
    rows = as_list(node["components"], f"{path}.components", n)
    return tuple(tuple(parse_expression(e, f"{path}.components[{i}][{j}]")
                       for j, e in enumerate(as_list(row, f"{path}.components[{i}]", n)))
                 for i, row in enumerate(rows))


def decode_metric(node: Any, path: str, name: str) -> MetricChart:
    """``{coords, components | diagonal, orientation, guard}`` → MetricChart."""
    node = check_keys(node, path, ("components", "diagonal", "orientation", "guard"), ("coords",))
    coords = parse_coords(node["coords"], f"{path}.coords")
    rows = _components(node, path, coords)
    orientation = parse_orientation(node.get("orientation", 1), f"{path}.orientation")
    guard = parse_guard_node(node.get("guard"), f"{path}.guard")
    try:
        return MetricChart(coords, rows, orientation, guard, name)
    except (DimensionError, DomainError, ValueError) as e:
        raise ConfigError(f"{path}: {e}") from e


def decode_weyl(node: Any, path: str, name: str) -> WeylStructure:
    """``{coords, metric: {components|diagonal}, alpha, guard, domain, scalar, orientation}``."""
    node = check_keys(node, path, ("alpha", "guard", "domain", "scalar", "orientation"), ("coords", "metric"))
    coords = parse_coords(node["coords"], f"{path}.coords", (3,))
    metric_node = check_keys(node["metric"], f"{path}.metric", ("components", "diagonal"))
    rows = _components(metric_node, f"{path}.metric", coords)
    orientation = parse_orientation(node.get("orientation", 1), f"{path}.orientation")
    guard = parse_guard_node(node.get("guard"), f"{path}.guard")
    alpha = tuple(parse_expression(a, f"{path}.alpha[{i}]")
                  for i, a in enumerate(as_list(node.get("alpha", ["0", "0", "0"]), f"{path}.alpha", 3)))
    domain = parse_box(node["domain"], f"{path}.domain", 3) if "domain" in node else None
    scalar = parse_expression(node["scalar"], f"{path}.scalar") if "scalar" in node else None
    try:
        h = MetricChart(coords, rows, orientation, guard, name)
    except (DimensionError, DomainError, ValueError) as e:
        raise ConfigError(f"{path}.metric: {e}") from e
    return WeylStructure(h, alpha, domain, scalar, name)


def decode_seed_table(node: Any, path: str) -> List[Dict[str, Any]]:
    rows = []
    for i, row in enumerate(as_list(node, path)):
        row_path = f"{path}[{i}]"
        row = check_keys(row, row_path, ("u", "v", "params", "region"))
        if "params" in row:
            as_list(row["params"], f"{row_path}.params", 4)
        elif "u" in row and "v" in row:
            parse_expression(row["u"], f"{row_path}.u")
            parse_expression(row["v"], f"{row_path}.v")
        else:
            raise ConfigError(f"{row_path}: a seed needs 'u' and 'v' or 'params'")
        if "region" in row:
            parse_box(row["region"], f"{row_path}.region", 4)
        rows.append(row)
    return rows


def decode_surface(node: Any, path: str, name: str) -> Tuple[SurfacePatch, List[Dict[str, Any]]]:
    """``{z: [4 expressions in u, v], domain, seeds}`` → (patch, validated seed rows)."""
    node = check_keys(node, path, ("domain", "seeds"), ("z",))
    z = tuple(parse_expression(c, f"{path}.z[{i}]") for i, c in enumerate(as_list(node["z"], f"{path}.z", 4)))
    domain = parse_box(node["domain"], f"{path}.domain", 4) if "domain" in node else None
    table = decode_seed_table(node.get("seeds", []), f"{path}.seeds")
    try:
        patch = SurfacePatch(z, domain, name) if domain is not None else SurfacePatch(z, name=name)
    except ValueError as e:
        raise ConfigError(f"{path}.z: {e}") from e
    return patch, table


def build_seeds(S: SurfacePatch, table: Sequence[Dict[str, Any]]) -> List[Seed]:
    return seeds_from_table(S, table, EVERYWHERE)


class Library:
    """Built-in surfaces, Weyl structures and flat metrics read from ``config/library.yaml``.

    Args:
        config_manager (Optional[ConfigManager]): Loaded configuration; a default one is created
        when omitted.
    """

    def __init__(self, config_manager: Optional[ConfigManager] = None) -> None:
        config_manager = config_manager or ConfigManager()
        try:
            self.document = as_mapping(config_manager.get("library"), "library")
        except KeyError as e:
            raise ConfigError("Built-in library 'library.yaml' not found") from e

    def _entry(self, section: str, name: str) -> Any:
        entries = self.document.get(section) or {}
        if name not in entries:
            raise ConfigError(f"Unknown builtin '{name}' (available {section}: {', '.join(sorted(entries))})")
        return entries[name]

    def names(self, section: str) -> List[str]:
        return sorted(self.document.get(section) or {})

    def weyl(self, name: str) -> WeylStructure:
        return decode_weyl(self._entry("weyl", name), f"library.weyl.{name}", name)

    def surface(self, name: str) -> Tuple[SurfacePatch, List[Dict[str, Any]]]:
        return decode_surface(self._entry("surfaces", name), f"library.surfaces.{name}", name)

    def metric(self, name: str, coords: Optional[Sequence[str]] = None) -> MetricChart:
        """Flat metric ``flat-n``, optionally renaming its coordinates."""
        node = check_keys(self._entry("metrics", name), f"library.metrics.{name}", (), ("coords",))
        default = parse_coords(node["coords"], f"library.metrics.{name}.coords")
        coords = tuple(coords) if coords is not None else default
        if len(coords) != len(default):
            raise ConfigError(f"Builtin '{name}' has {len(default)} coordinates, got {len(coords)}")
        return flat_metric(coords, name=name)
