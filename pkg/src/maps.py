"""Maps between charts: differential, horizontal conformality, tension field, harmonic-morphism
verdict, and the almost Hermitian structure attached to a submersion onto a surface.

A map chart returns second-order jets of its *real* target components; a complex-valued
expression map contributes two real targets (real part, imaginary part) per component.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Protocol, Sequence, Tuple

import numpy as np

from src.autodiff import DEFAULT_STEP, Jet2, fd_gradient, lift_point
from src.errors import (SAMPLE_ERRORS, DimensionError, NotAlmostComplex, NotHorizontallyConformal,
                        NotSubmersive, OutOfDomain)
from src.exprlang import TRUE, Expression, Guard, as_expression, eval_jet, parse_guard
from src.geometry import ConnectionField, MetricChart, as_real, christoffel
from src.report import Check, CheckReport, sample_error

RANK_TOL = 1e-10


# ----------------------------------------------------------------------------
# Map charts
# ----------------------------------------------------------------------------

class MapChart:
    """Base class of maps from a source chart to R^target_dim."""

    coords: Tuple[str, ...] = ()
    target_dim: int = 0
    guard: Guard = TRUE
    name: str = ""

    @property
    def source_dim(self) -> int:
        return len(self.coords)

    def require(self, p: Sequence[float]) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.source_dim,):
            raise DimensionError(f"Point of dimension {p.size} for a map from dimension {self.source_dim}")
        failing = self.guard.failing(dict(zip(self.coords, p)))
        if failing is not None:
            raise OutOfDomain(f"Point {p.tolist()} violates the guard '{failing.render()}'")
        return p

    def component_jets(self, p: Sequence[float]) -> List[Jet2]:
        raise NotImplementedError

    def jets(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(value[a], jacobian[a, i], hessian[a, i, j]) of the real components at p."""
        jets = self.component_jets(p)
        value = as_real(np.array([j.value for j in jets]), f"Map '{self.name}'")
        jac = as_real(np.array([j.grad for j in jets]), f"Map '{self.name}' derivatives")
        hess = as_real(np.array([j.hess for j in jets]), f"Map '{self.name}' second derivatives")
        return value, jac, hess

    def value(self, p: Sequence[float]) -> np.ndarray:
        return self.jets(p)[0]

    def __call__(self, p: Sequence[float]) -> np.ndarray:
        return self.value(p)


class ExpressionMap(MapChart):
    """Map given by expressions in the source coordinates.

    Args:
        coords (Sequence[str]): Source coordinates.
        components (Sequence): Target component expressions (strings or parsed).
        complex_valued (bool): Each component stands for two real targets (re, im).
        guard (Optional[str]): Domain guard source.
        name (str): Label.
    """

    def __init__(self, coords: Sequence[str], components: Sequence, complex_valued: bool = False,
                 guard=None, name: str = "") -> None:
        self.coords = tuple(coords)
        self.components: Tuple[Expression, ...] = tuple(as_expression(c) for c in components)
        self.complex_valued = complex_valued
        self.guard = guard if isinstance(guard, Guard) else parse_guard(guard)
        self.name = name
        self.target_dim = len(self.components) * (2 if complex_valued else 1)

    def component_jets(self, p: Sequence[float]) -> List[Jet2]:
        p = self.require(p)
        env = dict(zip(self.coords, lift_point(p)))
        jets = [eval_jet(c, env, self.source_dim) for c in self.components]
        if not self.complex_valued:
            return jets
        return [part for j in jets for part in (j.real(), j.imag())]


class ComposedMap(MapChart):
    """outer ∘ inner, with jets propagated by the second-order chain rule."""

    def __init__(self, outer: MapChart, inner: MapChart, name: str = "") -> None:
        if inner.target_dim != outer.source_dim:
            raise DimensionError(f"Cannot compose: inner target {inner.target_dim} vs outer source {outer.source_dim}")
        self.outer, self.inner = outer, inner
        self.coords = inner.coords
        self.target_dim = outer.target_dim
        self.guard = inner.guard
        self.name = name or f"{outer.name}∘{inner.name}"

    def component_jets(self, p: Sequence[float]) -> List[Jet2]:
        y, dy, ddy = self.inner.jets(p)
        jets = []
        for outer_jet in self.outer.component_jets(y):
            grad = outer_jet.grad @ dy
            hess = dy.T @ outer_jet.hess @ dy + np.einsum("b,bij->ij", outer_jet.grad, ddy)
            jets.append(Jet2(outer_jet.value, grad, hess))
        return jets


class SliceMap(MapChart):
    """Restriction of a map to the coordinate slice {x_index = value}."""

    def __init__(self, base: MapChart, index: int, value: float = 0.0, name: str = "") -> None:
        if not 0 <= index < base.source_dim:
            raise DimensionError(f"Slice index {index} outside a {base.source_dim}-dimensional source")
        self.base, self.index, self.fixed = base, index, float(value)
        self.coords = base.coords[:index] + base.coords[index + 1:]
        self.target_dim = base.target_dim
        self.guard = TRUE
        self.name = name or f"{base.name}|{base.coords[index]}={value:g}"

    def embed(self, p: Sequence[float]) -> np.ndarray:
        return np.insert(np.asarray(p, dtype=float), self.index, self.fixed)

    def component_jets(self, p: Sequence[float]) -> List[Jet2]:
        p = self.require(p)
        keep = [i for i in range(self.base.source_dim) if i != self.index]
        return [Jet2(j.value, j.grad[keep], j.hess[np.ix_(keep, keep)])
                for j in self.base.component_jets(self.embed(p))]


def projection_map(coords: Sequence[str], keep: Sequence[str], guard=None, name: str = "") -> ExpressionMap:
    return ExpressionMap(coords, list(keep), False, guard, name)


# ----------------------------------------------------------------------------
# Differential, conformality, tension
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Differential:
    matrix: np.ndarray
    rank: int

    @property
    def surjective(self) -> bool:
        return self.rank == self.matrix.shape[0]


def _rank(matrix: np.ndarray) -> int:
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular.size == 0 or singular[0] == 0.0:
        return 0
    return int(np.sum(singular > RANK_TOL * max(1.0, singular[0])))


def differential(f: MapChart, p: Sequence[float]) -> Differential:
    """Jacobian (target_dim × source_dim) of f at p and its numerical rank."""
    jac = f.jets(p)[1]
    return Differential(jac, _rank(jac))


def dilation_tensor(jac: np.ndarray, g_source: np.ndarray) -> np.ndarray:
    """P^ab = g^ij ∂_i f^a ∂_j f^b."""
    return jac @ np.linalg.inv(g_source) @ jac.T


def hwc_residual(f: MapChart, g_M: MetricChart, g_N: MetricChart, p: Sequence[float]) -> Tuple[float, float]:
    """(Λ, residual): Λ = tr(P g_N)/m and residual = |P − Λ g_N^{-1}|_{g_N}.

    A map with vanishing differential at p is horizontally weakly conformal there: (0, 0).
    """
    value, jac, _ = f.jets(p)
    if np.max(np.abs(jac), initial=0.0) == 0.0:
        return 0.0, 0.0
    p_tensor = dilation_tensor(jac, g_M.at(p))
    gn = g_N.at(value)
    lam = float(np.trace(p_tensor @ gn)) / f.target_dim
    deviation = p_tensor - lam * np.linalg.inv(gn)
    residual = math.sqrt(max(0.0, float(np.einsum("ab,cd,ac,bd->", deviation, deviation, gn, gn))))
    return lam, residual


def tension_field(f: MapChart, g_M: MetricChart, target_conn: ConnectionField, p: Sequence[float]) -> np.ndarray:
    """τ^a = g^ij (∂_ij f^a − Γ^k_ij ∂_k f^a + Γ^a_bc(f(p)) ∂_i f^b ∂_j f^c)."""
    value, jac, hess = f.jets(p)
    ginv = np.linalg.inv(g_M.at(p))
    gamma_m = christoffel(g_M, p).gamma
    gamma_n = target_conn.coefficients(value).gamma
    second = (hess - np.einsum("kij,ak->aij", gamma_m, jac)
              + np.einsum("abc,bi,cj->aij", gamma_n, jac, jac))
    return np.einsum("ij,aij->a", ginv, second)


def _target_norm(vector: np.ndarray, gn: np.ndarray) -> float:
    return math.sqrt(max(0.0, float(vector @ gn @ vector)))


def harmonic_morphism_verdict(f: MapChart, g_M: MetricChart, target_conn: ConnectionField, g_N: MetricChart,
                              samples: Sequence[Sequence[float]], tolerance: float = 1e-6,
                              name: str = "harmonic_morphism") -> CheckReport:
    """Samples |τ| and the hwc residual; passes iff both stay below the tolerance everywhere.

    Per-sample exceptions are recorded as errors of the check and make it fail. The check
    extras carry the per-sample curves ``tension``, ``hwc`` and ``dilation`` and the maxima
    of the first two.
    """
    residuals: List[Optional[float]] = []
    errors = []
    tension_curve, hwc_curve, dilation_curve = [], [], []
    for p in samples:
        try:
            tau = tension_field(f, g_M, target_conn, p)
            lam, hwc = hwc_residual(f, g_M, g_N, p)
            tau_norm = _target_norm(tau, g_N.at(f.value(p)))
        except SAMPLE_ERRORS as e:
            errors.append(sample_error(p, e))
            residuals.append(None)
            continue
        tension_curve.append(tau_norm)
        hwc_curve.append(hwc)
        dilation_curve.append(lam)
        residuals.append(max(tau_norm, hwc))
    extras = {
        "tension": tension_curve,
        "hwc": hwc_curve,
        "dilation": dilation_curve,
        "max_tension": max(tension_curve, default=0.0),
        "max_hwc": max(hwc_curve, default=0.0),
    }
    return CheckReport([Check.from_samples(name, tolerance, samples, residuals, errors, extras)])


# ----------------------------------------------------------------------------
# Almost Hermitian structures
# ----------------------------------------------------------------------------

class AlmostComplexField(Protocol):
    """(J, dJ) at points, with J[i, a] = J^i_a and dJ[i, a, m] = ∂_m J^i_a."""

    def jet(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        ...


STANDARD_J = np.array([[0.0, -1.0, 0.0, 0.0],
                       [1.0, 0.0, 0.0, 0.0],
                       [0.0, 0.0, 0.0, -1.0],
                       [0.0, 0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class ConstantComplexStructure:
    matrix: np.ndarray = field(default_factory=lambda: STANDARD_J.copy())

    def jet(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        n = self.matrix.shape[0]
        return np.asarray(self.matrix, dtype=float), np.zeros((n, n, n))


@dataclass(frozen=True)
class SampledComplexStructure:
    """J given pointwise; derivatives by central differences."""

    function: Callable[[np.ndarray], np.ndarray]
    step: float = DEFAULT_STEP

    def jet(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        p = np.asarray(p, dtype=float)
        return np.asarray(self.function(p)), fd_gradient(self.function, p, self.step)


def _first_order_matrix(value: np.ndarray, derivative: np.ndarray) -> List[List[Jet2]]:
    """Jets (value, ∂) of each entry; derivative[..., m] is the m-th partial."""
    rows, cols = value.shape
    return [[Jet2.first_order(value[i, j], derivative[i, j]) for j in range(cols)] for i in range(rows)]


def _inner(g: List[List[Jet2]], u: Sequence[Jet2], v: Sequence[Jet2]) -> Jet2:
    n = len(u)
    return sum((u[i] * g[i][j] * v[j] for i in range(n) for j in range(n)), Jet2.constant(0.0, u[0].n))


def _values(v: Sequence[Jet2]) -> np.ndarray:
    return np.array([x.value.real for x in v])


def _hermitian_frame(f: MapChart, g_M: MetricChart, orientation: int, p: Sequence[float],
                     tolerance: float) -> Tuple[List[List[Jet2]], List[List[Jet2]]]:
    """g-orthonormal frame [e1, e2, v1, v2] as first-order jets, and the metric jets."""
    if f.source_dim != 4 or f.target_dim != 2:
        raise DimensionError("Hermitian structures are built from submersions of a 4-manifold onto a surface")
    p = np.asarray(p, dtype=float)
    g, dg, ddg = g_M.jets(p)
    _, jac, hess = f.jets(p)
    if _rank(jac) < 2:
        raise NotSubmersive(f"Differential of rank {_rank(jac)} at {p.tolist()}")
    _, residual = _relative_hwc(jac, g)
    if residual > tolerance:
        raise NotHorizontallyConformal(f"Relative hwc residual {residual:.3e} at {p.tolist()}")
    n = 4
    ginv = np.linalg.inv(g)
    dginv = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
    g_jets = _first_order_matrix(g, dg)
    ginv_jets = _first_order_matrix(ginv, dginv)
    # gradient vectors X_a = g^{-1} dφ_a, exact to first order
    dphi = [[Jet2.first_order(jac[a, i], hess[a, i]) for i in range(n)] for a in range(2)]
    frame = []
    for a in range(2):
        x = [sum((ginv_jets[i][j] * dphi[a][j] for j in range(n)), Jet2.constant(0.0, n)) for i in range(n)]
        norm = _inner(g_jets, x, x).sqrt()
        frame.append([xi / norm for xi in x])
    for _ in range(2):
        best, best_norm = None, -1.0
        for k in range(n):
            candidate = [Jet2.constant(1.0 if i == k else 0.0, n) for i in range(n)]
            for e in frame:
                c = _inner(g_jets, e, candidate)
                candidate = [ci - c * ei for ci, ei in zip(candidate, e)]
            size = math.sqrt(max(0.0, float(_values(candidate) @ g @ _values(candidate))))
            if size > best_norm + 1e-12:
                best, best_norm = candidate, size
        norm = _inner(g_jets, best, best).sqrt()
        frame.append([bi / norm for bi in best])
    basis = np.column_stack([_values(e) for e in frame])
    if orientation * np.linalg.det(basis) < 0:
        frame[3] = [-x for x in frame[3]]
    return frame, g_jets


def _relative_hwc(jac: np.ndarray, g: np.ndarray) -> Tuple[float, float]:
    p_tensor = dilation_tensor(jac, g)
    lam = float(np.trace(p_tensor)) / 2.0
    return lam, float(np.linalg.norm(p_tensor - lam * np.eye(2))) / lam


def _hermitian_jets(f: MapChart, g_M: MetricChart, orientation: int, p: Sequence[float],
                    tolerance: float) -> List[List[Jet2]]:
    """J = B J0 Bᵀ g as first-order jets, B the oriented horizontal/vertical frame."""
    frame, g_jets = _hermitian_frame(f, g_M, orientation, p, tolerance)
    n = 4
    zero = Jet2.constant(0.0, n)
    # B J0 Bᵀ = e2⊗e1 − e1⊗e2 + v2⊗v1 − v1⊗v2 (as a (2,0) tensor); lower the second slot with g
    e1, e2, v1, v2 = frame
    rotation = [[e2[i] * e1[k] - e1[i] * e2[k] + v2[i] * v1[k] - v1[i] * v2[k] for k in range(n)] for i in range(n)]
    return [[sum((rotation[i][k] * g_jets[k][a] for k in range(n)), zero) for a in range(n)] for i in range(n)]


def hermitian_from_submersion(f: MapChart, g_M: MetricChart, orientation: int, p: Sequence[float],
                              tolerance: float = 1e-6) -> np.ndarray:
    """Almost Hermitian structure J (J[i, a] = J^i_a) attached to a submersion φ: M⁴ → C at p.

    J turns the horizontal gradient of re φ into that of im φ, and on the fibre it is the
    rotation making the total frame carry ``orientation`` relative to the chart.

    Raises:
        NotSubmersive: if dφ has rank below 2.
        NotHorizontallyConformal: if the relative hwc residual exceeds ``tolerance``.
    """
    jets = _hermitian_jets(f, g_M, orientation, p, tolerance)
    return np.array([[x.value.real for x in row] for row in jets])


@dataclass(frozen=True)
class HermitianStructureField:
    """The field p ↦ J(p) of ``hermitian_from_submersion`` with exact first derivatives."""

    submersion: MapChart
    metric: MetricChart
    orientation: int = 1
    tolerance: float = 1e-6

    def at(self, p: Sequence[float]) -> np.ndarray:
        return hermitian_from_submersion(self.submersion, self.metric, self.orientation, p, self.tolerance)

    def jet(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        jets = _hermitian_jets(self.submersion, self.metric, self.orientation, p, self.tolerance)
        value = np.array([[x.value.real for x in row] for row in jets])
        derivative = np.array([[x.grad.real for x in row] for row in jets])
        return value, derivative


def nijenhuis_tensor(J: np.ndarray, dJ: np.ndarray) -> np.ndarray:
    """N^i_ab = N(∂_a, ∂_b)^i = J^j_a ∂_j J^i_b − J^j_b ∂_j J^i_a + J^i_k (∂_b J^k_a − ∂_a J^k_b)."""
    return (np.einsum("ja,ibj->iab", J, dJ) - np.einsum("jb,iaj->iab", J, dJ)
            + np.einsum("ik,kab->iab", J, dJ) - np.einsum("ik,kba->iab", J, dJ))


def nijenhuis_residual(J: AlmostComplexField, p: Sequence[float], square_tol: float = 1e-8) -> float:
    """Frobenius norm of the Nijenhuis tensor over the coordinate fields at p.

    Raises:
        NotAlmostComplex: if |J² + Id| exceeds ``square_tol``.
    """
    value, derivative = J.jet(p)
    n = value.shape[0]
    defect = float(np.max(np.abs(value @ value + np.eye(n))))
    if defect > square_tol:
        raise NotAlmostComplex(f"|J² + Id| = {defect:.3e} at {list(p)}")
    return float(np.linalg.norm(nijenhuis_tensor(value, derivative)))


def orientation_count(f: MapChart, g_M: MetricChart, p: Sequence[float], tolerance: float = 1e-6) -> int:
    """Number of orientations (of ±1) whose structure J is integrable at p."""
    return sum(1 for sign in (1, -1)
               if nijenhuis_residual(HermitianStructureField(f, g_M, sign, tolerance), p) <= tolerance)


def orientation_residuals(f: MapChart, g_M: MetricChart, p: Sequence[float],
                          tolerance: float = 1e-6) -> Tuple[float, float]:
    """Nijenhuis residuals for the positive and the negative orientation."""
    return tuple(nijenhuis_residual(HermitianStructureField(f, g_M, sign, tolerance), p)
                 for sign in (1, -1))
