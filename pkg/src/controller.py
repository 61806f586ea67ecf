import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Set, Tuple

import numpy as np

import src
from src.calderbank import (DEFAULT_BASE_BOX, HSpaceChart, calderbank_metric, compose_extension, pole_check,
                            retract, surface_target)
from src.config_manager import ConfigManager
from src.errors import SAMPLE_ERRORS, ConfigError
from src.exprlang import Expression
from src.geometry import (LeviCivitaField, MetricChart, einstein_residual, frobenius_residual, scalar_curvature,
                          weyl_split)
from src.library import (Library, as_list, as_mapping, as_number, build_seeds, check_keys, decode_metric,
                         decode_surface, decode_weyl, parse_box, parse_coords, parse_expression, parse_guard_node)
from src.logger import Logger
from src.maps import ExpressionMap, MapChart, harmonic_morphism_verdict, hwc_residual, orientation_residuals
from src.oracle import jet_discrepancy, quaternion_law_residual, random_expression
from src.report import Check, CheckReport, canonical_json, sample_error
from src.sampling import Box, derive_seed, halton_points
from src.twistor import (NewtonSettings, SurfacePatch, cauchy_riemann_residual, closed_form_rotational,
                         contact_residual, horizontal_isotropic_directions, incidence_point, invert_incidence,
                         isotropic_distribution, isotropy_residual, sky_tangent_pairing, submersion_from_surface)
from src.weyl import WeylConnectionField, WeylStructure, einstein_weyl_residual, weyl_scalar

SECTIONS = ("name", "include", "metric", "weyl", "surface", "map", "hspace", "check")
COMMON_CHECK_KEYS = ("name", "kind", "tolerance", "samples", "domain")

# kind -> (required fields, optional fields)
KIND_FIELDS: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    "scalar_curvature": (("metric", "expected"), ()),
    "einstein": (("metric",), ()),
    "weyl_tensor": (("metric",), ("component",)),
    "weyl_scalar": (("weyl", "expected"), ()),
    "einstein_weyl": (("weyl",), ()),
    "contact": (("surface",), ()),
    "cauchy_riemann": (("surface",), ()),
    "incidence_roundtrip": (("surface",), ("perturbation",)),
    "closed_form": (("map",), ("reference",)),
    "harmonic_morphism": (("map", "metric"), ("target_metric", "target_weyl", "conformal_only")),
    "dilation": (("map", "metric", "expected"), ("target_metric", "target_weyl")),
    "nijenhuis": (("map", "metric"), ("orientation", "expected_count")),
    "isotropic_frobenius": (("map", "metric"), ("sign",)),
    "pole_order": (("hspace",), ("t",)),
    "sky_contact": ((), ("slice",)),
    "jet_oracle": ((), ("coords", "depth", "hessian_tolerance")),
    "quaternion_laws": ((), ()),
}

KIND_CATEGORY = {
    "scalar_curvature": "metric", "einstein": "metric", "weyl_tensor": "metric",
    "jet_oracle": "metric", "quaternion_laws": "metric",
    "weyl_scalar": "weyl", "einstein_weyl": "weyl",
    "contact": "surface", "cauchy_riemann": "surface", "incidence_roundtrip": "surface",
    "closed_form": "surface", "sky_contact": "surface", "isotropic_frobenius": "surface",
    "nijenhuis": "surface",
    "pole_order": "calderbank",
    "harmonic_morphism": "metric", "dilation": "metric",
}

# check field -> suite section holding the referenced object
REFERENCES = {"metric": "metric", "target_metric": "metric", "weyl": "weyl", "target_weyl": "weyl",
              "surface": "surface", "map": "map", "hspace": "hspace"}

SUBCOMMAND_CATEGORY = {
    "verify-metric": "metric",
    "verify-weyl": "weyl",
    "surface-pipeline": "surface",
    "calderbank": "calderbank",
    "run": None,
}

WEYL_COMPONENTS = ("norm", "self_dual", "anti_self_dual", "either")


@dataclass
class CheckSpec:
    name: str
    kind: str
    tolerance: Optional[float]
    samples: Optional[int]
    domain: Optional[Box]
    fields: Dict[str, Any]


@dataclass
class Suite:
    """A validated suite document; derived objects are built lazily by a resolver."""

    name: str
    document: Dict[str, Any]
    metric: Dict[str, Any] = field(default_factory=dict)
    weyl: Dict[str, WeylStructure] = field(default_factory=dict)
    surface: Dict[str, Tuple[SurfacePatch, List[Dict[str, Any]]]] = field(default_factory=dict)
    hspace: Dict[str, str] = field(default_factory=dict)
    map: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    checks: List[CheckSpec] = field(default_factory=list)

    def section(self, name: str) -> Dict[str, Any]:
        return getattr(self, name)


def config_digest(document: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(document).encode("utf-8")).hexdigest()


class Resolver:
    """Builds and caches the derived objects of a suite (H-spaces, submersions, composed maps).

    Construction failures are cached too, so every check depending on a broken object fails
    with the same error kind.
    """

    def __init__(self, suite: Suite, controller: "Controller") -> None:
        self.suite = suite
        self.controller = controller
        self._cache: Dict[Tuple[str, str], Any] = {}

    def _get(self, key: Tuple[str, str], build: Callable[[], Any]) -> Any:
        if key not in self._cache:
            try:
                self._cache[key] = build()
            except SAMPLE_ERRORS as e:
                self.controller.logger.failure(f"Building {key[0]} '{key[1]}'", e)
                self._cache[key] = e
        value = self._cache[key]
        if isinstance(value, SAMPLE_ERRORS):
            raise value
        return value

    def metric(self, name: str) -> MetricChart:
        entry = self.suite.metric[name]
        if isinstance(entry, MetricChart):
            return entry
        return self.hspace(entry).g

    def weyl(self, name: str) -> WeylStructure:
        return self.suite.weyl[name]

    def hspace(self, name: str) -> HSpaceChart:
        def build() -> HSpaceChart:
            W = self.weyl(self.suite.hspace[name])
            return calderbank_metric(W, self.controller.calderbank_samples, logger=self.controller.logger, name=name)
        return self._get(("hspace", name), build)

    def surface(self, name: str) -> SurfacePatch:
        return self.suite.surface[name][0]

    def map(self, name: str) -> MapChart:
        node = self.suite.map[name]

        def build() -> MapChart:
            if "surface" in node:
                S, table = self.suite.surface[node["surface"]]
                seeds = build_seeds(S, table)
                f = submersion_from_surface(S, seeds, self.controller.newton, guard=node.get("guard"), name=name)
                return f.boundary() if node.get("slice", False) else f
            if "retract" in node:
                return retract(self.hspace(node["retract"]))
            if "compose" in node:
                return compose_extension(self.map(node["compose"]), self.hspace(node["hspace"]), name=name)
            return ExpressionMap(node["coords"], node["components"], bool(node.get("complex", False)),
                                 node.get("guard"), name)
        return self._get(("map", name), build)

    def target(self, check: CheckSpec) -> Tuple[Any, MetricChart]:
        """(connection, metric) of the target of a map check; flat R² by default."""
        if "target_weyl" in check.fields:
            W = self.weyl(check.fields["target_weyl"])
            return WeylConnectionField(W), W.h
        if "target_metric" in check.fields:
            g = self.metric(check.fields["target_metric"])
            return LeviCivitaField(g), g
        g, conn = surface_target()
        return conn, g

    def prepare(self, check: CheckSpec) -> None:
        """Builds every object the check references, in the calling thread."""
        for key, section in REFERENCES.items():
            if key in check.fields:
                {"metric": self.metric, "weyl": self.weyl, "surface": self.surface,
                 "map": self.map, "hspace": self.hspace}[section](check.fields[key])


class Controller:
    """Parses suite documents and runs their checks.

    Args:
        config_manager (Optional[ConfigManager]): Loaded configuration; a default one is created
        when omitted.
        logger (Optional[Logger]): Logger; built from the configuration when omitted.
    """

    def __init__(self, config_manager: Optional[ConfigManager] = None, logger: Optional[Logger] = None) -> None:

        # Initializing config and logger
        self.config = config_manager or ConfigManager()
        self.logger = logger or Logger(self.config)

        self.logger.println("Initializing Controller...", "DEBUG")

        self.library = Library(self.config)

        self.sample_count = int(self.config.setting("sampling", "count", default=100))
        self.scramble = bool(self.config.setting("sampling", "scramble", default=True))
        self.default_tolerance = float(self.config.setting("tolerances", "default", default=1e-6))
        self.kind_tolerances = {k: float(v) for k, v in (self.config.setting("tolerances", default={}) or {}).items()
                                if k != "default"}
        self.fd_step = float(self.config.setting("fd_step", default=1e-5))
        self.workers = max(1, int(self.config.setting("workers", default=4)))
        self.pole_check_t = float(self.config.setting("pole_check_t", default=1e-4))
        self.calderbank_samples = int(self.config.setting("calderbank_samples", default=32))
        newton = self.config.setting("newton", default={}) or {}
        self.newton = NewtonSettings(
            max_iterations=int(newton.get("max_iterations", 50)),
            step_tol=float(newton.get("step_tol", 1e-12)),
            residual_tol=float(newton.get("residual_tol", 1e-10)),
        )

        self.logger.println("Controller initialized successfully.", "DEBUG")

    # ------------------------------------------------------------------
    # Parsing
    # ------------------------------------------------------------------

    def _merge_includes(self, document: Dict[str, Any], seen: Set[str]) -> Dict[str, Any]:
        """Top-level ``include: [suite names]`` merges built-in suites into the document."""
        includes = as_list(document.get("include", []), "include")
        if not includes:
            return document
        merged: Dict[str, Any] = {"name": document.get("name", "")}
        parts = []
        for name in includes:
            name = str(name)
            if name in seen:
                raise ConfigError(f"include: suite '{name}' includes itself")
            try:
                parts.append(self._merge_includes(self.config.get_suite(name), seen | {name}))
            except KeyError as e:
                raise ConfigError(f"include: {e.args[0]}") from None
        parts.append(document)
        for part in parts:
            for section in ("metric", "weyl", "surface", "map", "hspace"):
                for key, value in (as_mapping(part.get(section) or {}, section)).items():
                    if key in merged.setdefault(section, {}) and merged[section][key] != value:
                        raise ConfigError(f"{section}.{key}: defined differently by included suites")
                    merged[section][key] = value
            merged.setdefault("check", []).extend(as_list(part.get("check") or [], "check"))
        return merged

    def parse(self, document: Any) -> Suite:
        """Validates a suite document and decodes its objects.

        Raises:
            ConfigError: naming the key path of the first schema violation.
        """
        document = as_mapping(document, "<document>")
        for key in document:
            if key not in SECTIONS:
                raise ConfigError(f"{key}: unknown top-level section")
        expanded = self._merge_includes(document, set())
        suite = Suite(str(expanded.get("name", "")), document)

        for name, node in as_mapping(expanded.get("weyl") or {}, "weyl").items():
            suite.weyl[name] = self._weyl(node, f"weyl.{name}", name)
        for name, node in as_mapping(expanded.get("hspace") or {}, "hspace").items():
            node = check_keys(node, f"hspace.{name}", (), ("weyl",))
            self._reference(suite, "weyl", node["weyl"], f"hspace.{name}.weyl")
            suite.hspace[name] = node["weyl"]
        for name, node in as_mapping(expanded.get("metric") or {}, "metric").items():
            suite.metric[name] = self._metric(suite, node, f"metric.{name}", name)
        for name, node in as_mapping(expanded.get("surface") or {}, "surface").items():
            suite.surface[name] = self._surface(node, f"surface.{name}", name)
        maps = as_mapping(expanded.get("map") or {}, "map")
        for name, node in maps.items():
            suite.map[name] = self._map_node(node, f"map.{name}")
        for name, node in suite.map.items():
            self._map_references(suite, name, node, f"map.{name}", set())

        names: Set[str] = set()
        for i, node in enumerate(as_list(expanded.get("check") or [], "check")):
            check = self._check(suite, node, f"check[{i}]")
            if check.name in names:
                raise ConfigError(f"check[{i}].name: duplicate check name '{check.name}'")
            names.add(check.name)
            suite.checks.append(check)
        return suite

    def _reference(self, suite: Suite, section: str, name: Any, path: str) -> None:
        if name not in suite.section(section):
            raise ConfigError(f"{path}: unknown {section} '{name}'")

    def _weyl(self, node: Any, path: str, name: str) -> WeylStructure:
        node = as_mapping(node, path)
        if "builtin" in node:
            check_keys(node, path, (), ("builtin",))
            return self.library.weyl(str(node["builtin"]))
        return decode_weyl(node, path, name)

    def _metric(self, suite: Suite, node: Any, path: str, name: str) -> Any:
        node = as_mapping(node, path)
        if "builtin" in node:
            check_keys(node, path, ("coords",), ("builtin",))
            coords = parse_coords(node["coords"], f"{path}.coords") if "coords" in node else None
            return self.library.metric(str(node["builtin"]), coords)
        if "hspace" in node:
            check_keys(node, path, (), ("hspace",))
            self._reference(suite, "hspace", node["hspace"], f"{path}.hspace")
            return node["hspace"]
        return decode_metric(node, path, name)

    def _surface(self, node: Any, path: str, name: str) -> Tuple[SurfacePatch, List[Dict[str, Any]]]:
        node = as_mapping(node, path)
        if "builtin" in node:
            check_keys(node, path, ("domain",), ("builtin",))
            S, table = self.library.surface(str(node["builtin"]))
            if "domain" in node:
                S = SurfacePatch(S.z, parse_box(node["domain"], f"{path}.domain", 4), S.name)
            return S, table
        return decode_surface(node, path, name)

    def _map_node(self, node: Any, path: str) -> Dict[str, Any]:
        node = as_mapping(node, path)
        if "surface" in node:
            node = check_keys(node, path, ("slice", "guard"), ("surface",))
            if not isinstance(node.get("slice", False), bool):
                raise ConfigError(f"{path}.slice: expected true or false")
            parse_guard_node(node.get("guard"), f"{path}.guard")
            return dict(node)
        if "retract" in node:
            return dict(check_keys(node, path, (), ("retract",)))
        if "compose" in node:
            return dict(check_keys(node, path, (), ("compose", "hspace")))
        node = check_keys(node, path, ("complex", "guard"), ("coords", "components"))
        coords = parse_coords(node["coords"], f"{path}.coords")
        components = [parse_expression(c, f"{path}.components[{i}]")
                      for i, c in enumerate(as_list(node["components"], f"{path}.components"))]
        unknown = set().union(*(c.variables() for c in components)) - set(coords)
        if unknown:
            raise ConfigError(f"{path}.components: unknown variables {sorted(unknown)}")
        return {"coords": coords, "components": components, "complex": bool(node.get("complex", False)),
                "guard": parse_guard_node(node.get("guard"), f"{path}.guard")}

    def _map_references(self, suite: Suite, name: str, node: Dict[str, Any], path: str, seen: Set[str]) -> None:
        if name in seen:
            raise ConfigError(f"{path}: composition cycle through map '{name}'")
        if "surface" in node:
            self._reference(suite, "surface", node["surface"], f"{path}.surface")
        elif "retract" in node:
            self._reference(suite, "hspace", node["retract"], f"{path}.retract")
        elif "compose" in node:
            self._reference(suite, "hspace", node["hspace"], f"{path}.hspace")
            self._reference(suite, "map", node["compose"], f"{path}.compose")
            self._map_references(suite, node["compose"], suite.map[node["compose"]], path, seen | {name})

    def map_source_dim(self, suite: Suite, name: str) -> int:
        node = suite.map[name]
        if "surface" in node:
            return 3 if node.get("slice", False) else 4
        if "retract" in node or "compose" in node:
            return 4
        return len(node["coords"])

    def metric_dim(self, suite: Suite, name: str) -> int:
        entry = suite.metric[name]
        return entry.dim if isinstance(entry, MetricChart) else 4

    def _check(self, suite: Suite, node: Any, path: str) -> CheckSpec:
        node = as_mapping(node, path)
        if "kind" not in node:
            raise ConfigError(f"{path}.kind: required key missing")
        kind = node["kind"]
        if kind not in KIND_FIELDS:
            raise ConfigError(f"{path}.kind: unknown check kind '{kind}'")
        required, optional = KIND_FIELDS[kind]
        node = check_keys(node, path, COMMON_CHECK_KEYS + optional, ("name",) + required)
        fields = {k: v for k, v in node.items() if k not in COMMON_CHECK_KEYS}
        for key, section in REFERENCES.items():
            if key in fields:
                self._reference(suite, section, fields[key], f"{path}.{key}")

        tolerance = as_number(node["tolerance"], f"{path}.tolerance") if "tolerance" in node else None
        samples = None
        if "samples" in node:
            samples = int(as_number(node["samples"], f"{path}.samples"))
            if samples <= 0:
                raise ConfigError(f"{path}.samples: must be positive")
        for key in ("expected", "perturbation", "t", "hessian_tolerance"):
            if key in fields and not (kind == "dilation" and key == "expected"):
                fields[key] = as_number(fields[key], f"{path}.{key}")
        if kind == "dilation":
            fields["expected"] = parse_expression(fields["expected"], f"{path}.expected")
        if fields.get("component", "norm") not in WEYL_COMPONENTS:
            raise ConfigError(f"{path}.component: one of {', '.join(WEYL_COMPONENTS)}")
        if fields.get("reference", "rotational") != "rotational":
            raise ConfigError(f"{path}.reference: only 'rotational' is available")
        if fields.get("orientation", 1) not in (1, -1):
            raise ConfigError(f"{path}.orientation: must be 1 or -1")
        if fields.get("expected_count", 1) not in (0, 1, 2):
            raise ConfigError(f"{path}.expected_count: must be 0, 1 or 2")
        if fields.get("sign", "both") not in (1, -1, "both"):
            raise ConfigError(f"{path}.sign: must be 1, -1 or both")
        for key in ("slice", "conformal_only"):
            if key in fields and not isinstance(fields[key], bool):
                raise ConfigError(f"{path}.{key}: expected true or false")
        if "coords" in fields:
            fields["coords"] = parse_coords(fields["coords"], f"{path}.coords", (1, 2, 3, 4))
        if "depth" in fields:
            fields["depth"] = int(as_number(fields["depth"], f"{path}.depth"))

        dim = self._domain_dim(suite, kind, fields)
        domain = parse_box(node["domain"], f"{path}.domain", dim) if "domain" in node else None
        if domain is None and self._default_domain(suite, kind, fields) is None:
            raise ConfigError(f"{path}.domain: required for checks of kind '{kind}'")
        if kind in ("isotropic_frobenius",) and self.map_source_dim(suite, fields["map"]) != 3:
            raise ConfigError(f"{path}.map: isotropic directions need a map from a 3-dimensional chart")
        if "map" in fields and "metric" in fields:
            if self.map_source_dim(suite, fields["map"]) != self.metric_dim(suite, fields["metric"]):
                raise ConfigError(f"{path}: map '{fields['map']}' and metric '{fields['metric']}' have different dimensions")
        return CheckSpec(str(node["name"]), kind, tolerance, samples, domain, fields)

    def _domain_dim(self, suite: Suite, kind: str, fields: Dict[str, Any]) -> Optional[int]:
        if "map" in fields:
            return self.map_source_dim(suite, fields["map"])
        if "metric" in fields:
            return self.metric_dim(suite, fields["metric"])
        if "weyl" in fields or "hspace" in fields:
            return 3
        if "surface" in fields:
            return 4
        return {"sky_contact": 8, "quaternion_laws": 12, "jet_oracle": len(fields.get("coords", ("x1", "x2", "x3")))}.get(kind)

    def _default_domain(self, suite: Suite, kind: str, fields: Dict[str, Any]) -> Optional[Box]:
        if "surface" in fields:
            return suite.surface[fields["surface"]][0].domain
        if kind in ("weyl_scalar", "einstein_weyl"):
            return suite.weyl[fields["weyl"]].domain
        if kind == "pole_order":
            return suite.weyl[suite.hspace[fields["hspace"]]].domain or DEFAULT_BASE_BOX
        if kind == "sky_contact":
            return Box((-1.0,) * 8, (1.0,) * 8)
        if kind == "quaternion_laws":
            return Box((-2.0,) * 12, (2.0,) * 12)
        if kind == "jet_oracle":
            n = len(fields.get("coords", ("x1", "x2", "x3")))
            return Box((-1.0,) * n, (1.0,) * n)
        return None

    # ------------------------------------------------------------------
    # Categories
    # ------------------------------------------------------------------

    def _map_root(self, suite: Suite, name: str) -> str:
        node = suite.map[name]
        if "surface" in node:
            return "surface"
        if "retract" in node or "compose" in node:
            return "hspace"
        return "expression"

    def category(self, suite: Suite, check: CheckSpec) -> str:
        """Subcommand category of a check: metric, weyl, surface or calderbank."""
        fields = check.fields
        if check.kind == "pole_order":
            return "calderbank"
        if "metric" in fields and not isinstance(suite.metric[fields["metric"]], MetricChart):
            return "calderbank"
        if "map" in fields and self._map_root(suite, fields["map"]) == "hspace":
            return "calderbank"
        if check.kind in ("harmonic_morphism", "dilation") and self._map_root(suite, fields["map"]) == "surface":
            return "surface"
        return KIND_CATEGORY[check.kind]

    # ------------------------------------------------------------------
    # Running
    # ------------------------------------------------------------------

    def tolerance(self, check: CheckSpec, overrides: Optional[Mapping[str, float]]) -> float:
        overrides = overrides or {}
        if check.name in overrides:
            return float(overrides[check.name])
        if "*" in overrides:
            return float(overrides["*"])
        if check.tolerance is not None:
            return check.tolerance
        return self.kind_tolerances.get(check.kind, self.default_tolerance)

    def run_suite(self, document: Any, seed: int = 0, tol_overrides: Optional[Mapping[str, float]] = None,
                  samples: Optional[int] = None, category: Optional[str] = None) -> CheckReport:
        """Validates ``document`` and runs its checks (those of ``category`` when given).

        Raises:
            ConfigError: before any check runs, if the document violates the schema.
        """
        suite = self.parse(document)
        selected = [c for c in suite.checks if category is None or self.category(suite, c) == category]
        self.logger.println(f"Suite '{suite.name}': {len(selected)} of {len(suite.checks)} checks, seed {seed}", "INFO")

        resolver = Resolver(suite, self)
        ready: List[Tuple[CheckSpec, Optional[Check]]] = []
        for check in selected:
            try:
                resolver.prepare(check)
                ready.append((check, None))
            except SAMPLE_ERRORS as e:
                tol = self.tolerance(check, tol_overrides)
                ready.append((check, Check.failed(check.name, tol, type(e).__name__, str(e))))

        def run(item: Tuple[CheckSpec, Optional[Check]]) -> Check:
            check, failed = item
            if failed is not None:
                return failed
            return self.run_check(resolver, check, seed, tol_overrides, samples)

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            results = list(pool.map(run, ready))

        for result in sorted(results, key=lambda c: c.name):
            self.logger.check_result(result)

        metadata = {
            "seed": int(seed),
            "config_digest": config_digest(document),
            "version": src.__version__,
            "suite": suite.name,
            "category": category or "all",
        }
        return CheckReport(results, metadata).sorted()

    def run_check(self, resolver: Resolver, check: CheckSpec, seed: int,
                  tol_overrides: Optional[Mapping[str, float]] = None, samples: Optional[int] = None) -> Check:
        tolerance = self.tolerance(check, tol_overrides)
        count = samples or check.samples or self.sample_count
        box = check.domain or self._default_domain(resolver.suite, check.kind, check.fields)
        check_seed = derive_seed(seed, check.name)
        points = halton_points(box, count, check_seed, self.scramble)
        self.logger.println(f"Running {check.kind} check '{check.name}' on {count} samples", "DEBUG")
        handler = getattr(self, f"_check_{check.kind}")
        try:
            return handler(resolver, check, points, tolerance, check_seed)
        except SAMPLE_ERRORS as e:
            self.logger.failure(f"Check '{check.name}' aborted", e)
            return Check.failed(check.name, tolerance, type(e).__name__, str(e))

    def _collect(self, check: CheckSpec, tolerance: float, points: np.ndarray,
                 residual: Callable[[np.ndarray], float], extras: Optional[Dict[str, Any]] = None) -> Check:
        residuals: List[Optional[float]] = []
        errors = []
        for p in points:
            try:
                residuals.append(float(residual(p)))
            except SAMPLE_ERRORS as e:
                self.logger.failure(f"{check.name}: sample {p.tolist()}", e, "DEBUG")
                errors.append(sample_error(p, e))
                residuals.append(None)
        return Check.from_samples(check.name, tolerance, points, residuals, errors, extras)

    # -- metric -----------------------------------------------------------

    def _check_scalar_curvature(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        g, expected = r.metric(check.fields["metric"]), check.fields["expected"]
        return self._collect(check, tolerance, points, lambda p: abs(scalar_curvature(g, p) - expected))

    def _check_einstein(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        g = r.metric(check.fields["metric"])
        return self._collect(check, tolerance, points, lambda p: einstein_residual(g, p))

    def _check_weyl_tensor(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        g = r.metric(check.fields["metric"])
        component = check.fields.get("component", "norm")
        if component != "either":
            return self._collect(check, tolerance, points, lambda p: getattr(weyl_split(g, p), component))
        # either: whichever half vanishes over all samples
        splits: List[Optional[Any]] = []
        errors = []
        for p in points:
            try:
                splits.append(weyl_split(g, p))
            except SAMPLE_ERRORS as e:
                splits.append(None)
                errors.append(sample_error(p, e))
        plus = max((s.self_dual for s in splits if s is not None), default=0.0)
        minus = max((s.anti_self_dual for s in splits if s is not None), default=0.0)
        side = "self_dual" if plus <= minus else "anti_self_dual"
        residuals = [getattr(s, side) if s is not None else None for s in splits]
        extras = {"vanishing": side, "max_self_dual": plus, "max_anti_self_dual": minus}
        return Check.from_samples(check.name, tolerance, points, residuals, errors, extras)

    def _check_jet_oracle(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        coords = tuple(check.fields.get("coords", ("x1", "x2", "x3")))
        depth = check.fields.get("depth", 3)
        hess_tol = check.fields.get("hessian_tolerance", 1e-4)
        rng = np.random.default_rng(seed)
        worst = {"max_gradient_error": 0.0, "max_hessian_error": 0.0}

        def residual(p: np.ndarray) -> float:
            e = random_expression(rng, coords, depth)
            grad_err, hess_err = jet_discrepancy(e, coords, p, self.fd_step)
            worst["max_gradient_error"] = max(worst["max_gradient_error"], grad_err)
            worst["max_hessian_error"] = max(worst["max_hessian_error"], hess_err)
            # Hessian errors are rescaled onto the gradient tolerance
            return max(grad_err, hess_err * tolerance / hess_tol)

        result = self._collect(check, tolerance, points, residual)
        result.extras.update(worst)
        return result

    def _check_quaternion_laws(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        return self._collect(check, tolerance, points, quaternion_law_residual)

    # -- weyl -------------------------------------------------------------

    def _check_weyl_scalar(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        W, expected = r.weyl(check.fields["weyl"]), check.fields["expected"]
        return self._collect(check, tolerance, points, lambda p: abs(weyl_scalar(W, p) - expected))

    def _check_einstein_weyl(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        W = r.weyl(check.fields["weyl"])
        return self._collect(check, tolerance, points, lambda p: einstein_weyl_residual(W, p))

    # -- surface ----------------------------------------------------------

    def _check_contact(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        S = r.surface(check.fields["surface"])
        return self._collect(check, tolerance, points, lambda p: abs(contact_residual(S, p)))

    def _check_cauchy_riemann(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        S = r.surface(check.fields["surface"])
        return self._collect(check, tolerance, points, lambda p: cauchy_riemann_residual(S, p))

    def _check_incidence_roundtrip(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        S = r.surface(check.fields["surface"])
        perturbation = check.fields.get("perturbation", 1e-2)
        rng = np.random.default_rng(seed)
        worst = {"max_parameter_error": 0.0}

        def residual(p: np.ndarray) -> float:
            guess = p + perturbation * np.maximum(1.0, np.abs(p)) * rng.standard_normal(4)
            x = incidence_point(S, p)
            y = invert_incidence(S, x, guess, self.newton)
            worst["max_parameter_error"] = max(worst["max_parameter_error"], float(np.linalg.norm(y - p)))
            return float(np.linalg.norm(incidence_point(S, y) - x))

        result = self._collect(check, tolerance, points, residual)
        result.extras.update(worst)
        return result

    def _check_closed_form(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        f = r.map(check.fields["map"])

        def residual(p: np.ndarray) -> float:
            value = f.value(p)
            return abs(complex(value[0], value[1]) - closed_form_rotational(p))

        return self._collect(check, tolerance, points, residual)

    def _check_sky_contact(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        on_slice = check.fields.get("slice", True)

        def residual(p: np.ndarray) -> float:
            x = np.array(p[:4])
            if on_slice:
                x[3] = 0.0
            return sky_tangent_pairing(x, (complex(p[4], p[5]), complex(p[6], p[7])))

        if on_slice:
            points = np.array(points)
            points[:, 3] = 0.0
        return self._collect(check, tolerance, points, residual)

    def _check_nijenhuis(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        f, g = r.map(check.fields["map"]), r.metric(check.fields["metric"])
        orientation = check.fields.get("orientation", 1)
        expected_count = check.fields.get("expected_count")
        seen = {"positive": [], "negative": [], "count": []}

        def residual(p: np.ndarray) -> float:
            positive, negative = orientation_residuals(f, g, p)
            count = int(positive <= tolerance) + int(negative <= tolerance)
            seen["positive"].append(positive)
            seen["negative"].append(negative)
            seen["count"].append(count)
            if expected_count is not None:
                return float(abs(count - expected_count))
            return positive if orientation == 1 else negative

        result = self._collect(check, tolerance, points, residual)
        result.extras.update({
            "max_positive": max(seen["positive"], default=0.0),
            "max_negative": max(seen["negative"], default=0.0),
            "integrable_orientations": sorted(set(seen["count"])),
        })
        return result

    def _check_isotropic_frobenius(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        f, g = r.map(check.fields["map"]), r.metric(check.fields["metric"])
        sign = check.fields.get("sign", "both")
        signs = (1, -1) if sign == "both" else (sign,)
        distributions = {s: isotropic_distribution(f, g, s) for s in signs}

        def residual(p: np.ndarray) -> float:
            d_plus, d_minus = horizontal_isotropic_directions(f, g, p)
            isotropy = max(isotropy_residual(d_plus, g, p), isotropy_residual(d_minus, g, p))
            return max([isotropy] + [frobenius_residual(distributions[s], p) for s in signs])

        return self._collect(check, tolerance, points, residual)

    # -- maps -------------------------------------------------------------

    def _check_harmonic_morphism(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        f, g = r.map(check.fields["map"]), r.metric(check.fields["metric"])
        conn, g_target = r.target(check)
        if check.fields.get("conformal_only", False):
            return self._collect(check, tolerance, points, lambda p: hwc_residual(f, g, g_target, p)[1])
        report = harmonic_morphism_verdict(f, g, conn, g_target, points, tolerance, check.name)
        return report.checks[0]

    def _check_dilation(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        f, g = r.map(check.fields["map"]), r.metric(check.fields["metric"])
        _, g_target = r.target(check)
        expected: Expression = check.fields["expected"]

        def residual(p: np.ndarray) -> float:
            lam, _ = hwc_residual(f, g, g_target, p)
            return abs(lam - expected.evaluate(dict(zip(f.coords, (float(x) for x in p)))).real)

        return self._collect(check, tolerance, points, residual)

    # -- calderbank -------------------------------------------------------

    def _check_pole_order(self, r: Resolver, check: CheckSpec, points, tolerance, seed) -> Check:
        H = r.hspace(check.fields["hspace"])
        t = check.fields.get("t", self.pole_check_t)
        result = self._collect(check, tolerance, points, lambda x: pole_check(H, x, t))
        result.extras["t"] = t
        return result


def run_suite(config: Any, seed: int = 0, tol_overrides: Optional[Mapping[str, float]] = None,
              samples: Optional[int] = None) -> CheckReport:
    """Runs every check of a parsed suite document with a default controller."""
    return Controller().run_suite(config, seed, tol_overrides, samples)
