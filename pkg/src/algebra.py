"""Small exact-algebra kernel: real quaternions, complex pairs and points of CP³.

Complex numbers are Python's built-in ``complex``. A quaternion a + b·i + c·j + d·k is also
viewed as a complex pair (α, β) meaning α + β·j with α = a + b·i and β = c + d·i; the pair
helpers below only use ``+``, ``-``, ``*`` and ``conjugate()`` so they work unchanged on
complex numbers and on jets.
"""

import math
from dataclasses import dataclass
from typing import Any, Sequence, Tuple

from src.errors import NearZeroQuaternion

SINGULAR_EPS = 1e-14


@dataclass(frozen=True)
class Quaternion:
    """Real quaternion q = a + b·i + c·j + d·k."""

    a: float
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other: Any) -> "Quaternion":
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return Quaternion(self.a * other, self.b * other, self.c * other, self.d * other)

    __rmul__ = __mul__

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        return math.sqrt(self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d)

    def inverse(self) -> "Quaternion":
        return quat_inv(self)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def to_pair(self) -> Tuple[complex, complex]:
        """Returns (α, β) with q = α + β·j."""
        return complex(self.a, self.b), complex(self.c, self.d)

    @classmethod
    def from_pair(cls, alpha: complex, beta: complex) -> "Quaternion":
        return embed_complex_pair(alpha, beta)

    def is_close(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product p·q."""
    return Quaternion(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )


def quat_inv(q: Quaternion, eps: float = SINGULAR_EPS) -> Quaternion:
    """Inverse conj(q)/|q|².

    Raises:
        NearZeroQuaternion: if |q| <= eps.
    """
    norm = q.norm()
    if norm <= eps:
        raise NearZeroQuaternion(f"Cannot invert quaternion of norm {norm:.3e}")
    return q.conjugate() * (1.0 / (norm * norm))


def embed_complex_pair(z1: complex, z2: complex) -> Quaternion:
    """z1 + z2·j as a real quaternion: re z1 + im z1·i + re z2·j + im z2·k."""
    z1, z2 = complex(z1), complex(z2)
    return Quaternion(z1.real, z1.imag, z2.real, z2.imag)


# Complex-pair arithmetic: (α, β) stands for α + β·j, and j·z = conj(z)·j.

def pair_mul(p: Sequence[Any], q: Sequence[Any]) -> Tuple[Any, Any]:
    """(α1 + β1 j)(α2 + β2 j) = α1α2 − β1·conj(β2) + (α1β2 + β1·conj(α2)) j."""
    a1, b1 = p
    a2, b2 = q
    return a1 * a2 - b1 * b2.conjugate(), a1 * b2 + b1 * a2.conjugate()


def pair_norm2(p: Sequence[Any]) -> Any:
    a, b = p
    return a * a.conjugate() + b * b.conjugate()


def pair_left_divide(p: Sequence[Any], q: Sequence[Any]) -> Tuple[Any, Any]:
    """p⁻¹·q without a norm check; callers guard |p| themselves."""
    a1, b1 = p
    n = pair_norm2(p)
    num = pair_mul((a1.conjugate(), -b1), q)
    return num[0] / n, num[1] / n


@dataclass(frozen=True)
class ProjectivePoint:
    """Point [z1 : z2 : z3 : z4] of CP³, stored with the representative it was built from."""

    z: Tuple[complex, complex, complex, complex]

    def __post_init__(self) -> None:
        if len(self.z) != 4:
            raise ValueError("A point of CP³ needs exactly four homogeneous coordinates")
        coords = tuple(complex(c) for c in self.z)
        if max(abs(c) for c in coords) == 0.0:
            raise ValueError("Homogeneous coordinates cannot all vanish")
        object.__setattr__(self, "z", coords)

    def normalize(self) -> "ProjectivePoint":
        """Divides by the entry of largest modulus, which becomes real positive (= 1)."""
        moduli = [abs(c) for c in self.z]
        largest = max(moduli)
        # first index within rounding of the maximum keeps ties deterministic under rescaling
        index = next(k for k, m in enumerate(moduli) if m >= largest * (1.0 - 1e-12))
        pivot = self.z[index]
        return ProjectivePoint(tuple(c / pivot for c in self.z))

    def scaled(self, factor: complex) -> "ProjectivePoint":
        return ProjectivePoint(tuple(factor * c for c in self.z))

    def is_close(self, other: "ProjectivePoint", tol: float = 1e-12) -> bool:
        a, b = self.normalize().z, other.normalize().z
        return max(abs(x - y) for x, y in zip(a, b)) <= tol
