"""The flat-model twistor pipeline.

Surfaces in CP³ are patches z(u, v) in two complex parameters; each complex parameter
contributes two real jet directions, ordered (u_re, u_im, v_re, v_im). Points of R⁴ are
quaternions x = x_A + x_B·i + x_C·j + x_D·k; the incidence relation is

    z₃ + z₄·j = (z₁ + z₂·j)·x.
"""

import functools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.algebra import ProjectivePoint, pair_left_divide, pair_mul
from src.autodiff import Jet2, complex_seed, lift_point
from src.errors import (SAMPLE_ERRORS, ContactViolation, IncidenceAtInfinity,
                        NoConvergence, NotHorizontallyConformal, OutOfDomain, SingularJacobian)
from src.exprlang import Expression, Guard, Var, as_expression, call, eval_jet, neg, parse, parse_guard
from src.geometry import CallableField, MetricChart
from src.logger import Logger
from src.maps import ExpressionMap, MapChart, SliceMap
from src.sampling import Box, halton_points

CHART_COORDS = ("x_A", "x_B", "x_C", "x_D")
PARAMETER_COORDS = ("u_re", "u_im", "v_re", "v_im")
SINGULAR_EPS = 1e-14


# ----------------------------------------------------------------------------
# Surface patches and the contact structure
# ----------------------------------------------------------------------------

def _as_parameters(uv: Sequence) -> np.ndarray:
    """(u, v) complex or (u_re, u_im, v_re, v_im) real → the 4 real parameters."""
    if len(uv) == 2:
        u, v = complex(uv[0]), complex(uv[1])
        return np.array([u.real, u.imag, v.real, v.imag])
    params = np.asarray(uv, dtype=float)
    if params.shape != (4,):
        raise ValueError("Surface parameters are (u, v) or (u_re, u_im, v_re, v_im)")
    return params


def to_complex(params: Sequence[float]) -> Tuple[complex, complex]:
    return complex(params[0], params[1]), complex(params[2], params[3])


@dataclass(frozen=True)
class SurfacePatch:
    """Surface z(u, v) = [z₁ : z₂ : z₃ : z₄] in CP³ over a parameter box.

    Attributes:
        z (Tuple[Expression, ...]): Four expressions in the complex variables u, v.
        domain (Box): Box in (u_re, u_im, v_re, v_im).
        name (str): Label.
    """

    z: Tuple[Expression, ...]
    domain: Box = field(default_factory=lambda: Box((-1.0, -1.0, -1.0, -1.0), (1.0, 1.0, 1.0, 1.0)))
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.z) != 4:
            raise ValueError("A surface patch has four homogeneous components")
        object.__setattr__(self, "z", tuple(as_expression(c) for c in self.z))
        unknown = set().union(*(c.variables() for c in self.z)) - {"u", "v"}
        if unknown:
            raise ValueError(f"Surface components use unknown variables: {sorted(unknown)}")

    @classmethod
    def from_strings(cls, components: Sequence[str], domain: Optional[Box] = None, name: str = "") -> "SurfacePatch":
        exprs = tuple(parse(c) for c in components)
        return cls(exprs, domain, name) if domain is not None else cls(exprs, name=name)

    def evaluate(self, uv: Sequence) -> np.ndarray:
        u, v = to_complex(_as_parameters(uv))
        return np.array([c.evaluate({"u": u, "v": v}) for c in self.z])

    def jets(self, uv: Sequence) -> List[Jet2]:
        """Jets of z₁..z₄ over the 4 real parameter directions."""
        ur, ui, vr, vi = lift_point(_as_parameters(uv))
        env = {"u": complex_seed(ur, ui), "v": complex_seed(vr, vi)}
        return [eval_jet(c, env, 4) for c in self.z]

    def point(self, uv: Sequence) -> ProjectivePoint:
        return ProjectivePoint(tuple(self.evaluate(uv)))


def contact_pairing(z: Sequence[complex], w: Sequence[complex]) -> complex:
    """θ_z(w) = z₁w₃ − z₃w₁ − z₂w₄ + z₄w₂."""
    return z[0] * w[2] - z[2] * w[0] - z[1] * w[3] + z[3] * w[1]


def contact_residual(S: SurfacePatch, uv: Sequence) -> complex:
    """θ(∂_v z) along the patch, ∂_v taken as the derivative in v_re."""
    jets = S.jets(uv)
    z = [j.value for j in jets]
    dz_dv = [j.grad[2] for j in jets]
    return complex(contact_pairing(z, dz_dv))


def cauchy_riemann_residual(S: SurfacePatch, uv: Sequence) -> float:
    """max |∂_{u_im} z − i∂_{u_re} z|, |∂_{v_im} z − i∂_{v_re} z| over the components."""
    residual = 0.0
    for jet in S.jets(uv):
        g = jet.grad
        residual = max(residual, abs(g[1] - 1j * g[0]), abs(g[3] - 1j * g[2]))
    return float(residual)


def conjugate_surface(S: SurfacePatch) -> SurfacePatch:
    """w = (−z̄₂, z̄₁, −z̄₄, z̄₃) in the parameters (u', v') = (ū, v̄)."""
    flip = {"u": call("conj", Var("u")), "v": call("conj", Var("v"))}
    bar = [call("conj", c.substitute(flip)) for c in S.z]
    lower, upper = S.domain.lower, S.domain.upper
    # conjugating the parameters flips the imaginary ranges
    domain = Box((lower[0], -upper[1], lower[2], -upper[3]), (upper[0], -lower[1], upper[2], -lower[3]))
    name = f"conj({S.name})" if S.name else ""
    return SurfacePatch((neg(bar[1]), bar[0], neg(bar[3]), bar[2]), domain, name)


# ----------------------------------------------------------------------------
# Incidence
# ----------------------------------------------------------------------------

def _incidence_from_pairs(z: Sequence) -> Tuple:
    q1, q2 = (z[0], z[1]), (z[2], z[3])
    alpha, beta = pair_left_divide(q1, q2)
    return alpha, beta


def _check_finite(z1, z2) -> None:
    norm = math.sqrt(abs(z1) ** 2 + abs(z2) ** 2)
    if norm <= SINGULAR_EPS:
        raise IncidenceAtInfinity(f"|z1 + z2 j| = {norm:.3e}")


def incidence_point(S: SurfacePatch, uv: Sequence) -> np.ndarray:
    """x = (z₁ + z₂j)⁻¹(z₃ + z₄j) as (x_A, x_B, x_C, x_D).

    Raises:
        IncidenceAtInfinity: if |z₁ + z₂j| ≤ 1e−14.
    """
    z = S.evaluate(uv)
    _check_finite(z[0], z[1])
    alpha, beta = _incidence_from_pairs(z)
    return np.array([alpha.real, alpha.imag, beta.real, beta.imag])


def incidence_jets(S: SurfacePatch, uv: Sequence) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, ∂x/∂params, ∂²x/∂params²) of the incidence map at the parameters."""
    jets = S.jets(uv)
    _check_finite(jets[0].value, jets[1].value)
    alpha, beta = _incidence_from_pairs(jets)
    parts = [alpha.real(), alpha.imag(), beta.real(), beta.imag()]
    value = np.array([p.value.real for p in parts])
    jac = np.array([p.grad.real for p in parts])
    hess = np.array([p.hess.real for p in parts])
    return value, jac, hess


@dataclass(frozen=True)
class NewtonSettings:
    max_iterations: int = 50
    step_tol: float = 1e-12
    residual_tol: float = 1e-10
    condition_tol: float = 1e-12
    max_halvings: int = 30


def invert_incidence(S: SurfacePatch, x: Sequence[float], guess: Sequence,
                     settings: NewtonSettings = NewtonSettings(), logger: Optional[Logger] = None) -> np.ndarray:
    """Newton solve of incidence_point(S, ·) = x from ``guess``; returns the 4 real parameters.

    Raises:
        SingularJacobian: if the Jacobian is numerically singular at an iterate.
        NoConvergence: if the iteration budget is exhausted.
        OutOfDomain: if the solution leaves the parameter box of S.
    """
    x = np.asarray(x, dtype=float)
    y = _as_parameters(guess).astype(float)
    value, jac, _ = incidence_jets(S, y)
    residual = value - x
    for iteration in range(settings.max_iterations):
        singular = np.linalg.svd(jac, compute_uv=False)
        if singular[-1] <= settings.condition_tol * singular[0]:
            raise SingularJacobian(f"Incidence Jacobian singular at parameters {y.tolist()}")
        step = np.linalg.solve(jac, -residual)
        norm = float(np.linalg.norm(residual))
        if norm < settings.residual_tol and float(np.linalg.norm(step)) < settings.step_tol:
            break
        scale = 1.0
        for _ in range(settings.max_halvings):
            try:
                trial_value, trial_jac, _ = incidence_jets(S, y + scale * step)
            except IncidenceAtInfinity:
                scale *= 0.5
                continue
            trial_residual = trial_value - x
            if float(np.linalg.norm(trial_residual)) <= norm or norm < settings.residual_tol:
                break
            scale *= 0.5
        else:
            raise NoConvergence(f"Line search failed at parameters {y.tolist()}")
        y = y + scale * step
        value, jac, residual = trial_value, trial_jac, trial_residual
        if logger is not None:
            logger.println(f"newton {iteration}: |F| = {float(np.linalg.norm(residual)):.3e}, step {scale:g}", "VERBOSE")
    else:
        raise NoConvergence(f"Newton did not converge in {settings.max_iterations} iterations (|F| = {float(np.linalg.norm(residual)):.3e})")
    if not S.domain.contains(y):
        raise OutOfDomain(f"Solution {y.tolist()} outside the parameter box of '{S.name}'")
    return y


# ----------------------------------------------------------------------------
# The induced submersion
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Seed:
    """Continuation anchor: parameters ``guess`` solving (approximately) the anchor point."""

    region: Box
    guess: Tuple[float, float, float, float]
    anchor: Optional[Tuple[float, float, float, float]] = None


def seeds_from_table(S: SurfacePatch, table: Sequence[dict], default_region: Box) -> List[Seed]:
    """Builds seeds from config rows ``{u, v}`` (complex strings) or ``{params}``, ``region`` optional."""
    seeds = []
    for row in table:
        if "params" in row:
            guess = tuple(float(x) for x in row["params"])
        else:
            u = as_expression(str(row["u"])).evaluate({})
            v = as_expression(str(row["v"])).evaluate({})
            guess = (u.real, u.imag, v.real, v.imag)
        region = default_region
        if "region" in row:
            region = Box(tuple(row["region"]["min"]), tuple(row["region"]["max"]))
        seeds.append(Seed(region, guess, tuple(incidence_point(S, guess))))
    return seeds


class IncidenceSubmersion(MapChart):
    """x ↦ u(x), inverting the incidence map by continuation from a seed table.

    The chart has source coordinates (x_A, x_B, x_C, x_D) and two real targets (re u, im u).
    Jets come from the implicit function theorem applied to the incidence map.
    """

    def __init__(self, surface: SurfacePatch, seeds: Sequence[Seed], settings: NewtonSettings = NewtonSettings(),
                 max_step: float = 0.25, guard=None, name: str = "") -> None:
        if not seeds:
            raise ValueError("A submersion needs at least one seed")
        self.surface = surface
        self.seeds = tuple(seeds)
        self.settings = settings
        self.max_step = max_step
        self.coords = CHART_COORDS
        self.target_dim = 2
        self.guard = as_guard(guard)
        self.name = name or f"submersion({surface.name})"
        self.logger = Logger()
        self._solve_cached = functools.lru_cache(maxsize=4096)(self._solve)

    def _nearest_seed(self, x: np.ndarray) -> Seed:
        candidates = [s for s in self.seeds if s.region.contains(x)] or list(self.seeds)
        return min(candidates, key=lambda s: float(np.linalg.norm(np.asarray(s.anchor) - x)))

    def _solve(self, key: Tuple[float, ...]) -> Tuple[float, ...]:
        x = np.asarray(key)
        seed = self._nearest_seed(x)
        start = np.asarray(seed.anchor)
        y = invert_incidence(self.surface, start, seed.guess, self.settings)
        steps = max(1, int(math.ceil(float(np.linalg.norm(x - start)) / self.max_step)))
        s, ds = 0.0, 1.0 / steps
        while s < 1.0:
            target = min(1.0, s + ds)
            try:
                y = invert_incidence(self.surface, start + target * (x - start), y, self.settings)
                s = target
                ds = min(2.0 * ds, 1.0 - s) if s < 1.0 else ds
            except (NoConvergence, SingularJacobian, IncidenceAtInfinity, OutOfDomain) as e:
                ds *= 0.5
                if ds < 1e-6:
                    self.logger.failure(f"Continuation to {x.tolist()}", e)
                    raise
                self.logger.println(f"Continuation step halved to {ds:.2e} towards {x.tolist()}", "DEBUG")
        return tuple(float(c) for c in y)

    def parameters(self, x: Sequence[float]) -> np.ndarray:
        x = self.require(x)
        return np.asarray(self._solve_cached(tuple(float(c) for c in x)))

    def component_jets(self, x: Sequence[float]) -> List[Jet2]:
        y = self.parameters(x)
        _, dF, ddF = incidence_jets(self.surface, y)
        dy = np.linalg.inv(dF)
        # D²y^a_ij = −(DF⁻¹)^a_b ∂²F^b_cd Dy^c_i Dy^d_j
        ddy = -np.einsum("ab,bcd,ci,dj->aij", dy, ddF, dy, dy)
        return [Jet2(y[a], dy[a], ddy[a]) for a in (0, 1)]

    def boundary(self) -> SliceMap:
        """Restriction to the slice {x_D = 0}, a 3 → 2 chart."""
        return SliceMap(self, 3, 0.0, name=f"{self.name}|x_D=0")


def as_guard(guard) -> Guard:
    return guard if isinstance(guard, Guard) else parse_guard(guard)


def submersion_from_surface(S: SurfacePatch, seeds: Sequence[Seed], settings: NewtonSettings = NewtonSettings(),
                            contact_samples: int = 64, contact_tol: float = 1e-10, guard=None,
                            name: str = "") -> IncidenceSubmersion:
    """Submersion φ̃: x ↦ u(x) induced by a contact surface.

    Raises:
        ContactViolation: if the contact residual exceeds ``contact_tol`` at a sampled parameter.
    """
    worst = 0.0
    for params in halton_points(S.domain, contact_samples, seed=0):
        try:
            worst = max(worst, abs(contact_residual(S, params)))
        except SAMPLE_ERRORS:
            continue
    if worst > contact_tol:
        raise ContactViolation(f"Surface '{S.name}' has contact residual {worst:.3e}")
    return IncidenceSubmersion(S, seeds, settings, guard=guard, name=name)


def closed_form_rotational(x: Sequence[float]) -> complex:
    """x_A + i‖(x_B, x_C, x_D)‖, the map induced by the model surface on the u_im > 0 branch."""
    x = np.asarray(x, dtype=float)
    return complex(x[0], float(np.linalg.norm(x[1:])))


def rotational_map(coords: Sequence[str] = CHART_COORDS, guard=None, name: str = "rotational") -> ExpressionMap:
    """The closed form x_A + i‖(x_B, ...)‖ as an expression map over any number of coordinates."""
    radius = " + ".join(f"{c}^2" for c in coords[1:])
    return ExpressionMap(coords, [f"{coords[0]} + i*sqrt({radius})"], True, guard, name)


# ----------------------------------------------------------------------------
# Skies
# ----------------------------------------------------------------------------

def _quaternion_pair(x: Sequence[float]) -> Tuple[complex, complex]:
    return complex(x[0], x[1]), complex(x[2], x[3])


def sky(x: Sequence[float], s: Sequence[complex]) -> ProjectivePoint:
    """The point [σ : τ : z₃ : z₄] of the sky of x, with z₃ + z₄j = (σ + τj)·x."""
    sigma, tau = complex(s[0]), complex(s[1])
    if sigma == 0 and tau == 0:
        raise ValueError("Sky parameter [σ:τ] cannot vanish")
    z3, z4 = pair_mul((sigma, tau), _quaternion_pair(x))
    return ProjectivePoint((sigma, tau, z3, z4))


def sky_tangents(x: Sequence[float], s: Sequence[complex]) -> Tuple[np.ndarray, np.ndarray]:
    """Derivatives of the sky point in σ and in τ (the sky is linear in (σ, τ))."""
    a, b = _quaternion_pair(x)
    return np.array([1.0, 0.0, a, b]), np.array([0.0, 1.0, -b.conjugate(), a.conjugate()])


def sky_tangent_pairing(x: Sequence[float], s: Sequence[complex]) -> float:
    """max |θ_z(w)| over the two sky tangents w at z = sky(x, s)."""
    z = sky(x, s).z
    return max(abs(contact_pairing(z, w)) for w in sky_tangents(x, s))


# ----------------------------------------------------------------------------
# Isotropic directions of a submersion of a 3-manifold
# ----------------------------------------------------------------------------

def _gradient_vectors(f: MapChart, g: MetricChart, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    _, jac, _ = f.jets(p)
    if f.source_dim != 3 or f.target_dim != 2:
        raise ValueError("Isotropic directions are defined for maps from a 3-manifold to a surface")
    ginv = np.linalg.inv(g.at(p))
    x1, x2 = ginv @ jac[0], ginv @ jac[1]
    metric = g.at(p)
    n1, n2 = float(x1 @ metric @ x1), float(x2 @ metric @ x2)
    lam = 0.5 * (n1 + n2)
    if lam <= SINGULAR_EPS:
        raise NotHorizontallyConformal(f"Map is not submersive at {list(p)}")
    defect = math.hypot(n1 - n2, 2.0 * float(x1 @ metric @ x2)) / lam
    if defect > 1e-6:
        raise NotHorizontallyConformal(f"Relative hwc residual {defect:.3e} at {list(p)}")
    return x1, x2


def horizontal_isotropic_directions(f: MapChart, g: MetricChart, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """d± = (X₁ ± iX₂)/|X₁| with X_a = g⁻¹dφ_a; ⟨d±, d±⟩_g = 0 and re d± is a unit vector.

    Raises:
        NotHorizontallyConformal: if dφ is not conformal on the horizontal plane.
    """
    x1, x2 = _gradient_vectors(f, g, p)
    size = math.sqrt(float(x1 @ g.at(p) @ x1))
    return (x1 + 1j * x2) / size, (x1 - 1j * x2) / size


def isotropy_residual(d: np.ndarray, g: MetricChart, p: Sequence[float]) -> float:
    return abs(complex(d @ g.at(p) @ d))


def _field_jets(f: MapChart, g: MetricChart, p: np.ndarray):
    """First-order jets of dφ₁, dφ₂, g and g⁻¹ at p."""
    _, jac, hess = f.jets(p)
    metric, dg, _ = g.jets(p)
    ginv = np.linalg.inv(metric)
    dginv = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
    n = len(p)
    dphi = [[Jet2.first_order(jac[a, i], hess[a, i]) for i in range(n)] for a in range(2)]
    g_jets = [[Jet2.first_order(metric[i, j], dg[i, j]) for j in range(n)] for i in range(n)]
    ginv_jets = [[Jet2.first_order(ginv[i, j], dginv[i, j]) for j in range(n)] for i in range(n)]
    return dphi, g_jets, ginv_jets


def _det3(m: List[List[Jet2]]) -> Jet2:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _pack(vector: Sequence[Jet2]) -> Tuple[np.ndarray, np.ndarray]:
    return np.array([c.value for c in vector]), np.array([c.grad for c in vector])


def isotropic_distribution(f: MapChart, g: MetricChart, sign: int = 1) -> List[CallableField]:
    """Fields spanning d^⊥ = {w : ⟨w, d⟩ = 0} for d = d₊ (sign +1) or d₋ (sign −1).

    d^⊥ is spanned by d itself and the fibre direction V^i = ε^ijk ∂_jφ₁ ∂_kφ₂ / √det g.
    """

    def direction(p: np.ndarray):
        _gradient_vectors(f, g, p)
        dphi, g_jets, ginv_jets = _field_jets(f, g, p)
        n = len(p)
        zero = Jet2.constant(0.0, n)
        x1 = [sum((ginv_jets[i][j] * dphi[0][j] for j in range(n)), zero) for i in range(n)]
        x2 = [sum((ginv_jets[i][j] * dphi[1][j] for j in range(n)), zero) for i in range(n)]
        size = sum((x1[i] * g_jets[i][j] * x1[j] for i in range(n) for j in range(n)), zero).sqrt()
        return _pack([(a + (1j * sign) * b) / size for a, b in zip(x1, x2)])

    def vertical(p: np.ndarray):
        dphi, g_jets, _ = _field_jets(f, g, p)
        root = _det3(g_jets).sqrt()
        a, b = dphi
        cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        return _pack([c / root for c in cross])

    return [CallableField(3, direction), CallableField(3, vertical)]
