"""Weyl structures on 3-dimensional charts.

A Weyl structure is a representative metric h with a Lee form α; its Weyl connection D is the
torsion-free connection with D h = −2α⊗h:

    Γ^i_jk = Γ(h)^i_jk + δ^i_j α_k + δ^i_k α_j − h_jk α^i.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.autodiff import lift_point
from src.errors import DimensionError
from src.exprlang import Expression, as_expression, call, differentiate, eval_jet, mul, neg, sub
from src.geometry import (ConnectionCoefficients, MetricChart, curvature, covariant_derivative,
                          levi_civita_from_jets, trace_free_norm, as_real)
from src.sampling import Box


@dataclass(frozen=True)
class WeylStructure:
    """Representative metric ``h`` (dim 3) and Lee form ``alpha`` (3 expressions).

    Attributes:
        h (MetricChart): Representative of the conformal class.
        alpha (Tuple[Expression, Expression, Expression]): Lee form components α_i.
        domain (Optional[Box]): Sampling box of the base, used by Calderbank constructions.
        scalar (Optional[Expression]): Declared scalar curvature of D, when known in closed form.
        name (str): Label.
    """

    h: MetricChart
    alpha: Tuple[Expression, ...]
    domain: Optional[Box] = None
    scalar: Optional[Expression] = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.h.dim != 3:
            raise DimensionError(f"Weyl structures live on 3-dimensional charts, got {self.h.dim}")
        if len(self.alpha) != 3:
            raise DimensionError(f"The Lee form needs 3 components, got {len(self.alpha)}")
        object.__setattr__(self, "alpha", tuple(as_expression(a) for a in self.alpha))

    @property
    def coords(self) -> Tuple[str, ...]:
        return self.h.coords

    def is_metric(self) -> bool:
        return all(not a.variables() and a.evaluate({}) == 0 for a in self.alpha)

    def lee_jets(self, p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """(α_l, ∂_m α_l) at p."""
        p = self.h.require(p)
        env = dict(zip(self.coords, lift_point(p)))
        jets = [eval_jet(a, env, 3) for a in self.alpha]
        alpha = as_real(np.array([j.value for j in jets]), "Lee form")
        dalpha = as_real(np.array([j.grad for j in jets]), "Lee form derivatives")
        return alpha, dalpha

    def exterior_derivative(self) -> Tuple[Tuple[Expression, ...], ...]:
        """(dα)_ab = ∂_a α_b − ∂_b α_a as a symbolic antisymmetric matrix."""
        x = self.coords
        return tuple(tuple(sub(differentiate(self.alpha[b], x[a]), differentiate(self.alpha[a], x[b]))
                           for b in range(3)) for a in range(3))


def weyl_coefficients(h: np.ndarray, dh: np.ndarray, ddh: np.ndarray,
                      alpha: np.ndarray, dalpha: np.ndarray) -> ConnectionCoefficients:
    gamma, dgamma = levi_civita_from_jets(h, dh, ddh)
    n = h.shape[0]
    eye = np.eye(n)
    hinv = np.linalg.inv(h)
    dhinv = -np.einsum("ka,abm,bl->klm", hinv, dh, hinv)
    alpha_up = hinv @ alpha
    dalpha_up = np.einsum("ilm,l->im", dhinv, alpha) + hinv @ dalpha
    extra = (np.einsum("ij,k->ijk", eye, alpha) + np.einsum("ik,j->ijk", eye, alpha)
             - np.einsum("jk,i->ijk", h, alpha_up))
    dextra = (np.einsum("ij,km->ijkm", eye, dalpha) + np.einsum("ik,jm->ijkm", eye, dalpha)
              - np.einsum("jkm,i->ijkm", dh, alpha_up) - np.einsum("jk,im->ijkm", h, dalpha_up))
    return ConnectionCoefficients(gamma + extra, dgamma + dextra)


def weyl_connection(W: WeylStructure, p: Sequence[float]) -> ConnectionCoefficients:
    """Coefficients (and derivatives) of the Weyl connection of (h, α) at p.

    Raises:
        SingularMetric: if h(p) is degenerate.
    """
    h, dh, ddh = W.h.jets(p)
    alpha, dalpha = W.lee_jets(p)
    return weyl_coefficients(h, dh, ddh, alpha, dalpha)


@dataclass(frozen=True)
class WeylConnectionField:
    structure: WeylStructure

    @property
    def dim(self) -> int:
        return 3

    def coefficients(self, p: Sequence[float]) -> ConnectionCoefficients:
        return weyl_connection(self.structure, p)


def weyl_scalar(W: WeylStructure, p: Sequence[float]) -> float:
    """h-trace of the symmetrized Ricci tensor of D, through the generic curvature engine."""
    return curvature(WeylConnectionField(W), p, W.h).scalar


def einstein_weyl_residual(W: WeylStructure, p: Sequence[float]) -> float:
    """h-norm of the trace-free part of the symmetrized Ricci tensor of D."""
    curv = curvature(WeylConnectionField(W), p)
    return trace_free_norm(curv.symmetric_ricci, W.h.at(p))


def gauge_transform(W: WeylStructure, omega) -> WeylStructure:
    """The equivalent pair (e^{2ω}h, α − dω); its Weyl connection equals that of (h, α)."""
    omega = as_expression(omega)
    alpha = tuple(sub(a, differentiate(omega, x)) for a, x in zip(W.alpha, W.coords))
    scalar = None
    if W.scalar is not None:
        scalar = mul(call("exp", neg(mul(2.0, omega))), W.scalar)
    return WeylStructure(W.h.conformal(omega), alpha, W.domain, scalar, W.name)


def covariant_derivative_of_metric(W: WeylStructure, p: Sequence[float]) -> np.ndarray:
    """(D_k h)_ij at p; equals −2 α_k h_ij for every Weyl structure."""
    return covariant_derivative(W.h, WeylConnectionField(W), p)
