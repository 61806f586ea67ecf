"""Anti-self-dual Einstein metrics on I × M³ built from an Einstein–Weyl 3-structure (h, α):

    g = t⁻² ( F·h + F⁻¹·(dt + tα + ½t²·*dα)² ),   F = 1 − t²S/6,

with S the scalar curvature of the Weyl connection. The metric has a pole of order two along
t = 0 and the retract ψ(t, x) = x is a harmonic morphism onto (M³, D).
"""

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import SAMPLE_ERRORS, DomainError, IntervalViolation
from src.exprlang import Comparison, Expression, Guard, Var, add, call, const, div, is_zero, mul, power, sub, total
from src.geometry import LeviCivitaField, MetricChart, flat_metric, levi_civita_symbol, weyl_split
from src.logger import Logger
from src.maps import ComposedMap, ExpressionMap, MapChart, harmonic_morphism_verdict
from src.report import CheckReport
from src.sampling import Box, halton_points
from src.weyl import WeylConnectionField, WeylStructure, einstein_weyl_residual, weyl_scalar

DEFAULT_BASE_BOX = Box((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
CONSTANT_SPREAD = 1e-8
TIME = "t"


@dataclass(frozen=True)
class HSpaceChart:
    """The metric g on I × M³ in coordinates (t, x...), with its base and interval.

    Attributes:
        base (WeylStructure): The Einstein–Weyl boundary data.
        g (MetricChart): The 4-dimensional metric chart.
        scalar (Expression): The S used in the formula (constant or declared).
        t_max (float): Right end of the interval I = (0, t_max); inf when unbounded.
        name (str): Label.
    """

    base: WeylStructure
    g: MetricChart
    scalar: Expression
    t_max: float
    name: str = ""

    @property
    def coords(self) -> Tuple[str, ...]:
        return self.g.coords

    @property
    def interval_guard(self) -> Guard:
        clauses = [Comparison(Var(TIME), ">", const(0.0))]
        if math.isfinite(self.t_max):
            clauses.append(Comparison(Var(TIME), "<", const(self.t_max)))
        return Guard(tuple(clauses))

    def require(self, p: Sequence[float]) -> np.ndarray:
        """Checks p against the interval and the chart guard.

        Raises:
            IntervalViolation: where t²S − 6 vanishes (within 1e−12) or t ≤ 0.
            OutOfDomain: where the chart guard fails otherwise.
        """
        p = np.asarray(p, dtype=float)
        env = self.g.env(p)
        s = self.scalar.evaluate(env).real
        if p[0] <= 0.0 or abs(p[0] ** 2 * s - 6.0) <= 1e-12:
            raise IntervalViolation(f"t = {p[0]:g} is outside an admissible interval (t²S − 6 = {p[0] ** 2 * s - 6.0:.3e})")
        return self.g.require(p)

    def metric_at(self, p: Sequence[float]) -> np.ndarray:
        return self.g.at(self.require(p))


def interval_bound(s_max: float) -> float:
    """Right end of the interval containing small t on which t²S − 6 ≠ 0: √(6/S_max) or inf."""
    return math.sqrt(6.0 / s_max) if s_max > 0.0 else math.inf


def _det3(m: Sequence[Sequence[Expression]]) -> Expression:
    return total([
        mul(m[0][0], sub(mul(m[1][1], m[2][2]), mul(m[1][2], m[2][1]))),
        mul(-1.0, mul(m[0][1], sub(mul(m[1][0], m[2][2]), mul(m[1][2], m[2][0])))),
        mul(m[0][2], sub(mul(m[1][0], m[2][1]), mul(m[1][1], m[2][0]))),
    ])


def star_of_exterior_derivative(W: WeylStructure) -> Tuple[Expression, ...]:
    """(*dα)_k = orientation/(2√det h) · h_kc ε^abc (dα)_ab, assembled symbolically."""
    d_alpha = W.exterior_derivative()
    eps = levi_civita_symbol(3)
    h = W.h.components
    contracted = [total([mul(float(eps[a, b, c]), d_alpha[a][b])
                         for a, b in itertools.product(range(3), range(3)) if eps[a, b, c] != 0])
                  for c in range(3)]
    if all(is_zero(c) for c in contracted):
        return (const(0),) * 3
    scale = div(float(W.h.orientation) * 0.5, call("sqrt", _det3(h)))
    return tuple(mul(scale, total([mul(h[k][c], contracted[c]) for c in range(3)])) for k in range(3))


def _resolve_scalar(W: WeylStructure, points: np.ndarray, logger: Logger) -> Tuple[Expression, float]:
    """S as an expression plus its sampled maximum.

    A declared closed form is compared with weyl_scalar only at the samples where both evaluate.
    """
    admissible = []
    for p in points:
        try:
            admissible.append((p, weyl_scalar(W, p)))
        except SAMPLE_ERRORS as e:
            logger.println(f"weyl_scalar failed at {p.tolist()}: {e}", "DEBUG")
    if not admissible:
        raise DomainError(f"No admissible base point to sample the scalar curvature of '{W.name}'")
    sampled = [s for _, s in admissible]
    if W.scalar is not None:
        pairs = []
        for p, s in admissible:
            try:
                pairs.append((W.scalar.evaluate(W.h.env(p)).real, s))
            except SAMPLE_ERRORS as e:
                logger.println(f"Declared scalar failed at {p.tolist()}: {e}", "DEBUG")
        if not pairs:
            raise DomainError(f"The declared scalar curvature of '{W.name}' fails at every base sample")
        mismatch = max(abs(a - b) for a, b in pairs)
        if mismatch > 1e-6:
            logger.println(f"Declared scalar curvature of '{W.name}' differs from weyl_scalar by {mismatch:.3e}", "WARNING")
        return W.scalar, max(a for a, _ in pairs)
    spread = max(sampled) - min(sampled)
    if spread > CONSTANT_SPREAD:
        raise DomainError(f"Scalar curvature of '{W.name}' is not constant (spread {spread:.3e}); declare 'scalar'")
    value = float(np.mean(sampled))
    if abs(value) < CONSTANT_SPREAD:
        value = 0.0
    return const(value), value


def calderbank_metric(W: WeylStructure, samples: int = 32, ew_tolerance: float = 1e-6,
                      logger: Optional[Logger] = None, name: str = "") -> HSpaceChart:
    """Builds the H-space chart of an Einstein–Weyl structure.

    The Einstein–Weyl condition is sampled over the base box and only warned about.

    Raises:
        DomainError: if S is not constant and no closed form is declared.
    """
    logger = logger or Logger()
    box = W.domain or DEFAULT_BASE_BOX
    points = np.array([p for p in halton_points(box, samples, seed=0) if W.h.contains(p)])
    logger.println(f"Building H-space of '{W.name}' from {len(points)} base samples", "DEBUG")
    worst = 0.0
    for p in points:
        try:
            worst = max(worst, einstein_weyl_residual(W, p))
        except SAMPLE_ERRORS:
            continue
    if worst > ew_tolerance:
        logger.println(f"'{W.name}' is not Einstein–Weyl (residual {worst:.3e}); the metric need not be Einstein", "WARNING")

    scalar, s_max = _resolve_scalar(W, points, logger)
    t_max = interval_bound(s_max)
    t = Var(TIME)
    f = sub(1.0, div(mul(power(t, 2), scalar), 6.0))
    star = star_of_exterior_derivative(W)
    beta = [const(1.0)] + [add(mul(t, a), mul(mul(0.5, power(t, 2)), s)) for a, s in zip(W.alpha, star)]
    h_tilde = [[const(0.0)] * 4] + [[const(0.0)] + list(row) for row in W.h.components]
    inv_t2 = power(t, -2)
    rows = tuple(tuple(mul(inv_t2, add(mul(f, h_tilde[a][b]), div(mul(beta[a], beta[b]), f)))
                       for b in range(4)) for a in range(4))
    clauses = [Comparison(t, ">", const(0.0)), Comparison(sub(mul(power(t, 2), scalar), 6.0), "!=", const(0.0))]
    if math.isfinite(t_max):
        clauses.append(Comparison(t, "<", const(t_max)))
    guard = Guard(tuple(clauses)).conjoin(W.h.guard)
    label = name or f"hspace({W.name})"
    g = MetricChart((TIME,) + W.coords, rows, W.h.orientation, guard, label)
    logger.println(f"H-space '{label}': S_max = {s_max:.6g}, interval (0, {t_max:.6g})", "DEBUG")
    return HSpaceChart(W, g, scalar, t_max, label)


def pole_check(H: HSpaceChart, x: Sequence[float], t: float = 1e-4) -> float:
    """‖t²g(t, x) − (1 ⊕ h(x))‖_F at small t; small when g has a pole of order two at t = 0."""
    point = np.concatenate(([t], np.asarray(x, dtype=float)))
    scaled = t * t * H.metric_at(point)
    limit = np.zeros((4, 4))
    limit[0, 0] = 1.0
    limit[1:, 1:] = H.base.h.at(x)
    return float(np.linalg.norm(scaled - limit))


def retract(H: HSpaceChart) -> ExpressionMap:
    """ψ(t, x) = x."""
    return ExpressionMap(H.coords, list(H.base.coords), False, H.g.guard, name=f"retract({H.base.name})")


def retract_verdict(H: HSpaceChart, samples: Sequence[Sequence[float]], tolerance: float = 1e-6,
                    name: str = "retract") -> CheckReport:
    """Harmonic-morphism verdict of ψ against the Weyl connection of the base."""
    return harmonic_morphism_verdict(retract(H), H.g, WeylConnectionField(H.base), H.base.h, samples,
                                     tolerance, name)


def compose_extension(f: MapChart, H: HSpaceChart, name: str = "") -> ComposedMap:
    """f ∘ ψ for a map f defined on the base."""
    if f.source_dim != 3:
        raise DomainError("The extension composes a map defined on the 3-dimensional base")
    return ComposedMap(f, retract(H), name or f"{f.name}∘ψ")


def surface_target(coords: Sequence[str] = ("w_re", "w_im")) -> Tuple[MetricChart, LeviCivitaField]:
    """Flat representative of the conformal target surface and its connection."""
    g = flat_metric(coords, name="flat-target")
    return g, LeviCivitaField(g)


def anti_self_dual_orientation(H: HSpaceChart, points: Sequence[Sequence[float]], tolerance: float = 1e-6) -> int:
    """+1 when W⁺ vanishes at every point for the chart orientation, −1 when W⁻ does, 0 otherwise."""
    plus: List[float] = []
    minus: List[float] = []
    for p in points:
        split = weyl_split(H.g, p)
        plus.append(split.self_dual)
        minus.append(split.anti_self_dual)
    if plus and max(plus) <= tolerance:
        return 1
    if minus and max(minus) <= tolerance:
        return -1
    return 0
