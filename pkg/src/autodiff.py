"""Second-order forward-mode jets over real coordinates, and a finite-difference oracle.

A ``Jet2`` carries the value, gradient and Hessian of a (possibly complex-valued) function
with respect to ``n`` real base directions. A complex coordinate u is represented by two real
directions (u_re, u_im), so ``u = x + 1j * y`` with x, y seed jets. Holomorphic elementary
functions propagate through the ordinary chain rule; ``conjugate``, ``real``, ``imag`` and
``abs`` act componentwise on the real-direction derivatives.
"""

import cmath
from typing import Any, Callable, List, Sequence, Tuple, Union

import numpy as np

from src.errors import DimensionError, DomainError

SINGULAR_EPS = 1e-14
DEFAULT_STEP = 1e-5

Scalar = Union[int, float, complex]


def elementary(name: str, func: Callable[[complex], complex], v: complex) -> complex:
    """Applies a cmath function, reporting overflow as a domain error of the sample."""
    try:
        return func(v)
    except OverflowError as e:
        raise DomainError(f"{name} overflows at {v!r}") from e


class Jet2:
    """Value, gradient and symmetric Hessian of a function at a point."""

    __slots__ = ("value", "grad", "hess")
    # numpy defers mixed arithmetic to the Jet2 operators
    __array_ufunc__ = None

    def __init__(self, value: Scalar, grad: Any, hess: Any) -> None:
        self.value = complex(value)
        self.grad = np.asarray(grad, dtype=complex)
        self.hess = np.asarray(hess, dtype=complex)
        n = self.grad.shape[0]
        if self.grad.shape != (n,) or self.hess.shape != (n, n):
            raise DimensionError(f"Inconsistent jet shapes {self.grad.shape} and {self.hess.shape}")

    @property
    def n(self) -> int:
        return self.grad.shape[0]

    @classmethod
    def constant(cls, value: Scalar, n: int) -> "Jet2":
        return cls(value, np.zeros(n, dtype=complex), np.zeros((n, n), dtype=complex))

    @classmethod
    def variable(cls, value: float, index: int, n: int) -> "Jet2":
        grad = np.zeros(n, dtype=complex)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((n, n), dtype=complex))

    @classmethod
    def first_order(cls, value: Scalar, grad: Any) -> "Jet2":
        """Jet whose Hessian is unknown and carried as zero (only value/grad are meaningful)."""
        grad = np.asarray(grad, dtype=complex)
        return cls(value, grad, np.zeros((grad.shape[0], grad.shape[0]), dtype=complex))

    def _coerce(self, other: Any) -> "Jet2":
        if isinstance(other, Jet2):
            if other.n != self.n:
                raise DimensionError(f"Jet dimensions differ: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Jet2.constant(complex(other), self.n)
        return NotImplemented

    def _chain(self, f0: complex, f1: complex, f2: complex) -> "Jet2":
        """Composition with a scalar function whose derivatives at the value are f0, f1, f2."""
        g = self.grad
        return Jet2(f0, f1 * g, f1 * self.hess + f2 * np.outer(g, g))

    def __add__(self, other: Any) -> "Jet2":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __sub__(self, other: Any) -> "Jet2":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __rsub__(self, other: Any) -> "Jet2":
        return (-self) + other

    def __mul__(self, other: Any) -> "Jet2":
        if isinstance(other, (int, float, complex, np.number)):
            c = complex(other)
            return Jet2(self.value * c, self.grad * c, self.hess * c)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self, other
        hess = a.value * b.hess + b.value * a.hess + np.outer(a.grad, b.grad) + np.outer(b.grad, a.grad)
        return Jet2(a.value * b.value, a.value * b.grad + b.value * a.grad, hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        if abs(v) < SINGULAR_EPS:
            raise DomainError(f"Division by a value of modulus {abs(v):.3e}")
        return self._chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def __truediv__(self, other: Any) -> "Jet2":
        if isinstance(other, (int, float, complex, np.number)):
            if abs(other) < SINGULAR_EPS:
                raise DomainError(f"Division by a value of modulus {abs(other):.3e}")
            return self * (1.0 / complex(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other: Any) -> "Jet2":
        return self.reciprocal() * other

    def __pow__(self, exponent: int) -> "Jet2":
        if not isinstance(exponent, (int, np.integer)):
            raise TypeError("Jet powers take integer exponents only")
        n = int(exponent)
        if n == 0:
            return Jet2.constant(1.0, self.n)
        if n == 1:
            return self
        v = self.value
        if n < 0 and abs(v) < SINGULAR_EPS:
            raise DomainError(f"Negative power of a value of modulus {abs(v):.3e}")
        if n == 2:
            f2 = 2.0
        else:
            f2 = n * (n - 1) * v ** (n - 2)
        return self._chain(v ** n, n * v ** (n - 1), f2)

    def exp(self) -> "Jet2":
        e = elementary("exp", cmath.exp, self.value)
        return self._chain(e, e, e)

    def log(self) -> "Jet2":
        v = self.value
        if abs(v) < SINGULAR_EPS:
            raise DomainError("log at the branch point 0")
        return self._chain(cmath.log(v), 1.0 / v, -1.0 / (v * v))

    def sqrt(self) -> "Jet2":
        v = self.value
        if abs(v) < SINGULAR_EPS:
            raise DomainError("sqrt at the branch point 0")
        s = cmath.sqrt(v)
        return self._chain(s, 0.5 / s, -0.25 / (s * v))

    def sin(self) -> "Jet2":
        s, c = elementary("sin", cmath.sin, self.value), elementary("cos", cmath.cos, self.value)
        return self._chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = elementary("sin", cmath.sin, self.value), elementary("cos", cmath.cos, self.value)
        return self._chain(c, -s, -c)

    def conjugate(self) -> "Jet2":
        return Jet2(self.value.conjugate(), np.conj(self.grad), np.conj(self.hess))

    conj = conjugate

    def real(self) -> "Jet2":
        return Jet2(self.value.real, self.grad.real, self.hess.real)

    def imag(self) -> "Jet2":
        return Jet2(self.value.imag, self.grad.imag, self.hess.imag)

    def abs(self) -> "Jet2":
        v = self.value
        r = abs(v)
        if r < SINGULAR_EPS:
            raise DomainError("abs is not differentiable at 0")
        g = self.grad
        dr = (np.conj(v) * g).real / r
        ddr = (np.outer(np.conj(g), g).real + (np.conj(v) * self.hess).real) / r - np.outer(dr, dr) / r
        return Jet2(r, dr, ddr)

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"


def lift_point(p: Sequence[float]) -> List[Jet2]:
    """Seed jets: coordinate i lifts to (p_i, e_i, 0)."""
    n = len(p)
    return [Jet2.variable(float(x), i, n) for i, x in enumerate(p)]


def complex_seed(re: Jet2, im: Jet2) -> Jet2:
    """Complex coordinate u = re + i·im built from two real seed directions."""
    return re + 1j * im


_OPERATIONS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a: -a,
    "sqrt": lambda a: a.sqrt(),
    "exp": lambda a: a.exp(),
    "log": lambda a: a.log(),
    "sin": lambda a: a.sin(),
    "cos": lambda a: a.cos(),
    "conj": lambda a: a.conjugate(),
    "re": lambda a: a.real(),
    "im": lambda a: a.imag(),
    "abs": lambda a: a.abs(),
}


def jet_arith(op: str, *args: Jet2) -> Jet2:
    """Applies a named jet operation (add, mul, div, sqrt, exp, log, sin, cos, conj, ...)."""
    if op not in _OPERATIONS:
        raise ValueError(f"Unknown jet operation '{op}'")
    dims = {a.n for a in args if isinstance(a, Jet2)}
    if len(dims) > 1:
        raise DimensionError(f"Jet dimensions differ: {sorted(dims)}")
    return _OPERATIONS[op](*args)


def _steps(p: np.ndarray, h: float) -> np.ndarray:
    return h * np.maximum(1.0, np.abs(p))


def fd_gradient(f: Callable[[np.ndarray], Any], p: Sequence[float], h: float = DEFAULT_STEP) -> np.ndarray:
    """Central-difference first derivatives; the last axis of the result is the direction."""
    p = np.asarray(p, dtype=float)
    steps = _steps(p, h)
    columns = []
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = steps[i]
        columns.append((np.asarray(f(p + e)) - np.asarray(f(p - e))) / (2.0 * steps[i]))
    return np.stack(columns, axis=-1)


def fd_derivatives(f: Callable[[np.ndarray], Any], p: Sequence[float], h: float = DEFAULT_STEP) -> Tuple[np.ndarray, np.ndarray]:
    """Independent oracle: central-difference gradient and Hessian of f at p.

    The step in direction i is h·max(1, |p_i|). ``f`` may return a scalar or an array; the
    derivative axes are appended last. Errors raised by ``f`` propagate unchanged.
    """
    p = np.asarray(p, dtype=float)
    n = p.size
    steps = _steps(p, h)
    f0 = np.asarray(f(p))
    grad = fd_gradient(f, p, h)
    hess = np.zeros(f0.shape + (n, n), dtype=np.result_type(f0, float))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        hess[..., i, i] = (np.asarray(f(p + ei)) - 2.0 * f0 + np.asarray(f(p - ei))) / (steps[i] ** 2)
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = steps[j]
            value = (np.asarray(f(p + ei + ej)) - np.asarray(f(p + ei - ej))
                     - np.asarray(f(p - ei + ej)) + np.asarray(f(p - ei - ej))) / (4.0 * steps[i] * steps[j])
            hess[..., i, j] = value
            hess[..., j, i] = value
    return grad, hess
