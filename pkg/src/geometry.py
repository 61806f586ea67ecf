"""Curvature engine for metric charts and affine connections in dimensions 2 to 4.

Index conventions (all arrays are plain numpy arrays at a point):

* ``dg[i, j, k] = ∂_k g_ij`` and ``ddg[i, j, k, l] = ∂_k ∂_l g_ij``;
* ``gamma[k, i, j] = Γ^k_ij`` and ``dgamma[k, i, j, m] = ∂_m Γ^k_ij``;
* ``riemann[i, j, k, l] = R^i_jkl`` with
  R^i_jkl = ∂_k Γ^i_lj − ∂_l Γ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj, and Ric_jk = R^i_jik.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Protocol, Sequence, Tuple

import numpy as np

from src.autodiff import SINGULAR_EPS, lift_point
from src.errors import DegenerateSpan, DimensionError, DomainError, OutOfDomain, SingularMetric
from src.exprlang import TRUE, Expression, Guard, as_expression, call, eval_jet, mul, parse, parse_guard

# index pairs of the orthonormal 2-form basis: first three anti-self-dual partners of the last three
TWO_FORM_PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))
IMAGINARY_TOL = 1e-10


def _require_point(coords: Sequence[str], p: Sequence[float]) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (len(coords),):
        raise DimensionError(f"Point of dimension {p.size} for a chart in ({', '.join(coords)})")
    return p


def as_real(array: np.ndarray, what: str) -> np.ndarray:
    if np.max(np.abs(np.imag(array)), initial=0.0) > IMAGINARY_TOL * max(1.0, float(np.max(np.abs(array), initial=0.0))):
        raise DomainError(f"{what} must be real-valued")
    return np.real(array).astype(float)


# ----------------------------------------------------------------------------
# Metric charts
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricChart:
    """Coordinate chart carrying a symmetric matrix of metric-component expressions.

    Attributes:
        coords (Tuple[str, ...]): Coordinate names, in chart order.
        components (Tuple[Tuple[Expression, ...], ...]): Symmetric component matrix.
        orientation (int): +1 or −1, the sign attached to dx¹∧…∧dxⁿ.
        guard (Guard): Domain predicate; points failing it raise OutOfDomain.
        name (str): Label used in logs and reports.
    """

    coords: Tuple[str, ...]
    components: Tuple[Tuple[Expression, ...], ...]
    orientation: int = 1
    guard: Guard = TRUE
    name: str = ""

    def __post_init__(self) -> None:
        n = len(self.coords)
        if n not in (2, 3, 4):
            raise DimensionError(f"Metric charts have dimension 2, 3 or 4, got {n}")
        if len(self.components) != n or any(len(row) != n for row in self.components):
            raise DimensionError(f"Component matrix must be {n}x{n}")
        for i, j in itertools.combinations(range(n), 2):
            if self.components[i][j] != self.components[j][i]:
                raise DomainError(f"Metric components ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @classmethod
    def from_strings(cls, coords: Sequence[str], components: Sequence[Sequence[str]], orientation: int = 1,
                     guard: Optional[str] = None, name: str = "") -> "MetricChart":
        rows = tuple(tuple(as_expression(c) for c in row) for row in components)
        return cls(tuple(coords), rows, orientation, parse_guard(guard), name)

    @classmethod
    def diagonal(cls, coords: Sequence[str], entries: Sequence, orientation: int = 1,
                 guard: Optional[str] = None, name: str = "") -> "MetricChart":
        n = len(coords)
        if len(entries) != n:
            raise DimensionError(f"{len(entries)} diagonal entries for {n} coordinates")
        diag = [as_expression(e) for e in entries]
        rows = tuple(tuple(diag[i] if i == j else as_expression(0) for j in range(n)) for i in range(n))
        return cls(tuple(coords), rows, orientation, parse_guard(guard), name)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def with_guard(self, guard: Guard) -> "MetricChart":
        return MetricChart(self.coords, self.components, self.orientation, self.guard.conjoin(guard), self.name)

    def with_orientation(self, orientation: int) -> "MetricChart":
        return MetricChart(self.coords, self.components, orientation, self.guard, self.name)

    def conformal(self, omega) -> "MetricChart":
        """The representative e^{2ω}·g of the same conformal class."""
        factor = call("exp", mul(2.0, as_expression(omega)))
        rows = tuple(tuple(mul(factor, c) for c in row) for row in self.components)
        return MetricChart(self.coords, rows, self.orientation, self.guard, self.name)

    def env(self, p: Sequence[float]) -> Dict[str, float]:
        return dict(zip(self.coords, (float(x) for x in p)))

    def contains(self, p: Sequence[float]) -> bool:
        return self.guard.holds(self.env(p))

    def require(self, p: Sequence[float]) -> np.ndarray:
        p = _require_point(self.coords, p)
        failing = self.guard.failing(self.env(p))
        if failing is not None:
            raise OutOfDomain(f"Point {p.tolist()} violates the guard '{failing.render()}'")
        return p

    def at(self, p: Sequence[float]) -> np.ndarray:
        """Component matrix at p, checked for positive-definiteness."""
        p = self.require(p)
        env = self.env(p)
        n = self.dim
        g = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = self.components[i][j].evaluate(env)
        return check_positive_definite(as_real(g, "Metric components"))

    def jets(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Returns (g, dg, ddg) at p from second-order jets of the components."""
        p = self.require(p)
        env = dict(zip(self.coords, lift_point(p)))
        n = self.dim
        g = np.zeros((n, n), dtype=complex)
        dg = np.zeros((n, n, n), dtype=complex)
        ddg = np.zeros((n, n, n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                jet = eval_jet(self.components[i][j], env, n)
                g[i, j] = g[j, i] = jet.value
                dg[i, j] = dg[j, i] = jet.grad
                ddg[i, j] = ddg[j, i] = jet.hess
        g = check_positive_definite(as_real(g, "Metric components"))
        return g, as_real(dg, "Metric derivatives"), as_real(ddg, "Metric second derivatives")


def check_positive_definite(g: np.ndarray) -> np.ndarray:
    """Raises SingularMetric when g is degenerate and DomainError when it is indefinite."""
    eigenvalues = np.linalg.eigvalsh(g)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if eigenvalues[0] < -SINGULAR_EPS * scale:
        raise DomainError(f"Metric is not positive-definite (eigenvalue {eigenvalues[0]:.3e})")
    if eigenvalues[0] <= SINGULAR_EPS * scale:
        raise SingularMetric(f"Metric is degenerate (eigenvalue {eigenvalues[0]:.3e})")
    return g


def flat_metric(coords: Sequence[str], orientation: int = 1, name: str = "flat") -> MetricChart:
    return MetricChart.diagonal(coords, [1] * len(coords), orientation, name=name)


# ----------------------------------------------------------------------------
# Connections
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ConnectionCoefficients:
    """Γ^k_ij at a point (upper index first) and, when known, its first derivatives."""

    gamma: np.ndarray
    dgamma: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def torsion(self) -> np.ndarray:
        return self.gamma - np.transpose(self.gamma, (0, 2, 1))

    def is_symmetric(self, tol: float = 0.0) -> bool:
        return float(np.max(np.abs(self.torsion()))) <= tol


class ConnectionField(Protocol):
    """Anything that yields connection coefficients (with derivatives) at points."""

    dim: int

    def coefficients(self, p: Sequence[float]) -> ConnectionCoefficients:
        ...


def levi_civita_from_jets(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Christoffel symbols and their derivatives from the metric 2-jet."""
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as e:
        raise SingularMetric("Metric is not invertible") from e
    dginv = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
    # T_lij = ∂_i g_jl + ∂_j g_il − ∂_l g_ij
    t = np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    dt = np.einsum("jlim->lijm", ddg) + np.einsum("iljm->lijm", ddg) - np.einsum("ijlm->lijm", ddg)
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, t)
    dgamma = 0.5 * (np.einsum("klm,lij->kijm", dginv, t) + np.einsum("kl,lijm->kijm", ginv, dt))
    return gamma, dgamma


def christoffel(g: MetricChart, p: Sequence[float]) -> ConnectionCoefficients:
    """Levi-Civita coefficients Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij) at p.

    Raises:
        OutOfDomain: if p fails the chart guard.
        SingularMetric: if g(p) is degenerate.
    """
    gamma, dgamma = levi_civita_from_jets(*g.jets(p))
    return ConnectionCoefficients(gamma, dgamma)


@dataclass(frozen=True)
class LeviCivitaField:
    metric: MetricChart

    @property
    def dim(self) -> int:
        return self.metric.dim

    def coefficients(self, p: Sequence[float]) -> ConnectionCoefficients:
        return christoffel(self.metric, p)


def levi_civita_field(g: MetricChart) -> LeviCivitaField:
    return LeviCivitaField(g)


@dataclass(frozen=True)
class Curvature:
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: Optional[float] = None

    @property
    def symmetric_ricci(self) -> np.ndarray:
        return 0.5 * (self.ricci + self.ricci.T)


def riemann_from_coefficients(conn: ConnectionCoefficients) -> np.ndarray:
    if conn.dgamma is None:
        raise DimensionError("Curvature needs the derivatives of the connection coefficients")
    G, dG = conn.gamma, conn.dgamma
    return (np.einsum("iljk->ijkl", dG) - np.einsum("ikjl->ijkl", dG)
            + np.einsum("ikm,mlj->ijkl", G, G) - np.einsum("ilm,mkj->ijkl", G, G))


def curvature(conn: ConnectionField, p: Sequence[float], metric: Optional[MetricChart] = None) -> Curvature:
    """Riemann and Ricci tensors of a connection field at p.

    Args:
        conn (ConnectionField): Levi-Civita or Weyl connection field.
        p (Sequence[float]): Chart point.
        metric (Optional[MetricChart]): When given, the scalar curvature is the trace of the
            symmetrized Ricci tensor with respect to it.

    Returns:
        Curvature: riemann[i, j, k, l] = R^i_jkl, ricci[j, k] = R^i_jik and the scalar.
    """
    riemann = riemann_from_coefficients(conn.coefficients(p))
    ricci = np.einsum("ijik->jk", riemann)
    scalar = None
    if metric is not None:
        ginv = np.linalg.inv(metric.at(p))
        scalar = float(np.einsum("jk,jk->", ginv, 0.5 * (ricci + ricci.T)))
    return Curvature(riemann, ricci, scalar)


def tensor_norm(t: np.ndarray, ginv: np.ndarray) -> float:
    """g-norm of a covariant 2-tensor."""
    return math.sqrt(max(0.0, float(np.einsum("ab,cd,ac,bd->", t, t, ginv, ginv))))


def trace_free_norm(ric: np.ndarray, g: np.ndarray) -> float:
    """|T − (tr_g T / n)·g|_g for a symmetric 2-tensor T."""
    ginv = np.linalg.inv(g)
    s = float(np.einsum("jk,jk->", ginv, ric))
    return tensor_norm(ric - (s / g.shape[0]) * g, ginv)


def einstein_residual(g: MetricChart, p: Sequence[float]) -> float:
    """|Ric − (s/n)·g|_g of the Levi-Civita connection at p."""
    curv = curvature(LeviCivitaField(g), p)
    return trace_free_norm(curv.symmetric_ricci, g.at(p))


def scalar_curvature(g: MetricChart, p: Sequence[float]) -> float:
    return curvature(LeviCivitaField(g), p, g).scalar


def lower_first(riemann: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.einsum("ai,ijkl->ajkl", g, riemann)


def kulkarni_nomizu(h: np.ndarray, g: np.ndarray) -> np.ndarray:
    return (np.einsum("ik,jl->ijkl", h, g) + np.einsum("jl,ik->ijkl", h, g)
            - np.einsum("il,jk->ijkl", h, g) - np.einsum("jk,il->ijkl", h, g))


def weyl_tensor(riemann_down: np.ndarray, ricci: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Fully covariant Weyl tensor W = Rm − P ∧○ g, P the Schouten tensor."""
    n = g.shape[0]
    ginv = np.linalg.inv(g)
    s = float(np.einsum("jk,jk->", ginv, ricci))
    schouten = (ricci - s / (2.0 * (n - 1)) * g) / (n - 2)
    return riemann_down - kulkarni_nomizu(schouten, g)


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns form a positively oriented g-orthonormal frame (E^T g E = I)."""
    try:
        lower = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as e:
        raise SingularMetric("Metric is not positive-definite") from e
    return np.linalg.inv(lower).T


@dataclass(frozen=True)
class WeylSplit:
    norm: float
    self_dual: float
    anti_self_dual: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.norm, self.self_dual, self.anti_self_dual


def weyl_split(g: MetricChart, p: Sequence[float]) -> WeylSplit:
    """(|W|, |W⁺|, |W⁻|) of a 4-dimensional metric chart at p.

    W acts on 2-forms as a symmetric 6x6 matrix in the orthonormal basis e^a∧e^b; W± are its
    restrictions to the ±1 eigenspaces of the Hodge star of (g, orientation).
    """
    if g.dim != 4:
        raise DimensionError("The self-dual split needs a 4-dimensional chart")
    metric = g.at(p)
    curv = curvature(LeviCivitaField(g), p)
    w = weyl_tensor(lower_first(curv.riemann, metric), curv.symmetric_ricci, metric)
    frame = orthonormal_frame(metric)
    w_frame = np.einsum("ijkl,ia,jb,kc,ld->abcd", w, frame, frame, frame, frame)
    m = np.array([[w_frame[a, b, c, d] for (c, d) in TWO_FORM_PAIRS] for (a, b) in TWO_FORM_PAIRS])
    star = g.orientation * np.block([[np.zeros((3, 3)), np.eye(3)], [np.eye(3), np.zeros((3, 3))]])
    plus = 0.5 * (np.eye(6) + star)
    minus = 0.5 * (np.eye(6) - star)
    return WeylSplit(
        2.0 * float(np.linalg.norm(m)),
        2.0 * float(np.linalg.norm(plus @ m @ plus)),
        2.0 * float(np.linalg.norm(minus @ m @ minus)),
    )


# ----------------------------------------------------------------------------
# Forms
# ----------------------------------------------------------------------------

def levi_civita_symbol(n: int) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


def hodge_star_at(metric: np.ndarray, orientation: int, form: np.ndarray, degree: int) -> np.ndarray:
    """Hodge dual of a k-form given by its antisymmetric component array."""
    n = metric.shape[0]
    if (n, degree) not in ((3, 1), (3, 2), (4, 2)):
        raise DimensionError(f"Hodge star of a {degree}-form in dimension {n} is not supported")
    form = np.asarray(form)
    if form.shape != (n,) * degree:
        raise DimensionError(f"A {degree}-form in dimension {n} has shape {(n,) * degree}")
    det = float(np.linalg.det(metric))
    if det <= SINGULAR_EPS:
        raise SingularMetric(f"det g = {det:.3e}")
    ginv = np.linalg.inv(metric)
    eps = levi_civita_symbol(n)
    factor = orientation * math.sqrt(det) / math.factorial(degree)
    if degree == 1:
        raised = ginv @ form
        return factor * np.einsum("i,ijk->jk", raised, eps)
    raised = ginv @ form @ ginv.T
    if n == 3:
        return factor * np.einsum("ij,ijk->k", raised, eps)
    return factor * np.einsum("ij,ijkl->kl", raised, eps)


def hodge_star(g: MetricChart, p: Sequence[float], form: np.ndarray, degree: int) -> np.ndarray:
    """Hodge dual with volume form orientation·√det g·dx¹∧…∧dxⁿ.

    Supported: 3-dimensional charts with degree 1 or 2, 4-dimensional charts with degree 2.
    """
    return hodge_star_at(g.at(p), g.orientation, form, degree)


def form_norm(metric: np.ndarray, form: np.ndarray, degree: int) -> float:
    """|ω|_g with the 1/k! normalization, so |dx¹∧dx²| = 1 for the flat metric."""
    ginv = np.linalg.inv(metric)
    form = np.asarray(form, dtype=float)
    if degree == 1:
        return math.sqrt(float(form @ ginv @ form))
    if degree == 2:
        return math.sqrt(0.5 * float(np.einsum("ab,cd,ac,bd->", form, form, ginv, ginv)))
    raise DimensionError("form_norm supports degrees 1 and 2")


# ----------------------------------------------------------------------------
# Vector fields and distributions
# ----------------------------------------------------------------------------

class VectorField(Protocol):
    """Vector field with (values, jacobian[i, m] = ∂_m X^i) at points."""

    dim: int

    def jet(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        ...


@dataclass(frozen=True)
class ExpressionField:
    coords: Tuple[str, ...]
    components: Tuple[Expression, ...]

    @classmethod
    def from_strings(cls, coords: Sequence[str], components: Sequence[str]) -> "ExpressionField":
        return cls(tuple(coords), tuple(parse(c) for c in components))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def jet(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        p = _require_point(self.coords, p)
        env = dict(zip(self.coords, lift_point(p)))
        jets = [eval_jet(c, env, self.dim) for c in self.components]
        return np.array([j.value for j in jets]), np.array([j.grad for j in jets])


@dataclass(frozen=True)
class CallableField:
    """Field computed by a function returning (values, jacobian)."""

    dim: int
    function: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]] = field(compare=False)

    def jet(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        return self.function(np.asarray(p, dtype=float))


def lie_bracket(x: Tuple[np.ndarray, np.ndarray], y: Tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """[X, Y]^i = X^m ∂_m Y^i − Y^m ∂_m X^i from (values, jacobian) pairs."""
    (xv, xj), (yv, yj) = x, y
    return yj @ xv - xj @ yv


def frobenius_residual(spanning_fields: Sequence[VectorField], p: Sequence[float], rank_tol: float = 1e-10) -> float:
    """Largest norm of a pairwise Lie bracket component off the span of the fields at p.

    Raises:
        DegenerateSpan: if the fields are linearly dependent at p.
    """
    jets = [f.jet(p) for f in spanning_fields]
    span = np.column_stack([v for v, _ in jets]).astype(complex)
    singular = np.linalg.svd(span, compute_uv=False)
    if singular.size == 0 or singular[-1] <= rank_tol * max(1.0, singular[0]):
        raise DegenerateSpan(f"Spanning fields are dependent at {list(p)} (singular values {singular.tolist()})")
    residual = 0.0
    for a, b in itertools.combinations(range(len(jets)), 2):
        bracket = lie_bracket(jets[a], jets[b])
        coefficients = np.linalg.lstsq(span, bracket, rcond=None)[0]
        residual = max(residual, float(np.linalg.norm(bracket - span @ coefficients)))
    return residual


def covariant_derivative(metric: MetricChart, conn: ConnectionField, p: Sequence[float]) -> np.ndarray:
    """(D_k h)_ij = ∂_k h_ij − Γ^m_ki h_mj − Γ^m_kj h_im, returned as an array [k, i, j]."""
    h, dh, _ = metric.jets(p)
    gamma = conn.coefficients(p).gamma
    return (np.einsum("ijk->kij", dh) - np.einsum("mki,mj->kij", gamma, h) - np.einsum("mkj,im->kij", gamma, h))
