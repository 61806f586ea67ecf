"""Cross-checks of the jet engine against finite differences and of the quaternion laws."""

from typing import Sequence, Tuple

import numpy as np

from src.algebra import Quaternion, embed_complex_pair, pair_mul, quat_inv, quat_mul
from src.autodiff import DEFAULT_STEP, fd_derivatives, fd_gradient, lift_point
from src.exprlang import Expression, Var, add, call, const, div, eval_jet, mul, power, sub

_UNARY = ("sin", "cos", "square", "damp", "soft_sqrt", "gauss")
_BINARY = ("add", "sub", "mul")
HESSIAN_STEP = 1e-4


def random_expression(rng: np.random.Generator, coords: Sequence[str], depth: int = 3) -> Expression:
    """A random smooth expression that stays bounded on the unit box."""
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.7:
            return Var(coords[int(rng.integers(len(coords)))])
        return const(round(float(rng.uniform(-1.5, 1.5)), 3))
    if rng.random() < 0.45:
        op = _UNARY[int(rng.integers(len(_UNARY)))]
        a = random_expression(rng, coords, depth - 1)
        if op == "square":
            return power(a, 2)
        if op == "damp":
            return div(1.0, add(1.0, power(a, 2)))
        if op == "soft_sqrt":
            return call("sqrt", add(1.0, power(a, 2)))
        if op == "gauss":
            return call("exp", mul(-1.0, power(a, 2)))
        return call(op, a)
    op = _BINARY[int(rng.integers(len(_BINARY)))]
    a = random_expression(rng, coords, depth - 1)
    b = random_expression(rng, coords, depth - 1)
    return {"add": add, "sub": sub, "mul": mul}[op](a, b)


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(1.0, float(np.linalg.norm(a))))


def jet_discrepancy(e: Expression, coords: Sequence[str], p: Sequence[float], step: float = DEFAULT_STEP,
                    hessian_step: float = HESSIAN_STEP) -> Tuple[float, float]:
    """Relative gradient and Hessian differences between jets and central differences at p.

    The gradient uses ``step`` and the second differences the coarser ``hessian_step``.
    """
    p = np.asarray(p, dtype=float)
    jet = eval_jet(e, dict(zip(coords, lift_point(p))), len(coords))

    def f(x: np.ndarray) -> complex:
        return e.evaluate(dict(zip(coords, (float(c) for c in x))))

    grad = fd_gradient(f, p, step)
    _, hess = fd_derivatives(f, p, hessian_step)
    return _relative(np.asarray(jet.grad), grad), _relative(np.asarray(jet.hess), hess)


def quaternion_law_residual(values: Sequence[float]) -> float:
    """Worst violation of the quaternion laws for the three quaternions packed in 12 numbers.

    Covers associativity, multiplicativity of the norm and q·q⁻¹ = 1, plus the agreement of
    complex-pair products with Hamilton products under z₁ + z₂j.
    """
    v = np.asarray(values, dtype=float)
    p, q, r = (Quaternion(*v[4 * k:4 * k + 4]) for k in range(3))
    scale = max(1.0, p.norm() * q.norm() * r.norm())
    assoc = (quat_mul(quat_mul(p, q), r) - quat_mul(p, quat_mul(q, r))).norm() / scale
    norm = abs(quat_mul(p, q).norm() - p.norm() * q.norm()) / max(1.0, p.norm() * q.norm())
    unit = (quat_mul(q, quat_inv(q)) - Quaternion(1.0)).norm()
    z1, z2 = complex(v[0], v[1]), complex(v[2], v[3])
    j = Quaternion(0.0, 0.0, 1.0)
    embedded = (embed_complex_pair(z1, z2) - (embed_complex_pair(z1, 0) + quat_mul(embed_complex_pair(z2, 0), j))).norm()
    pair = embed_complex_pair(*pair_mul(p.to_pair(), q.to_pair()))
    product = (pair - quat_mul(p, q)).norm() / max(1.0, p.norm() * q.norm())
    return float(max(assoc, norm, unit, embedded, product))
