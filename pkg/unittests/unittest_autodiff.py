import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import cmath
import unittest
import numpy as np
from src.autodiff import Jet2, complex_seed, fd_derivatives, fd_gradient, jet_arith, lift_point
from src.errors import DimensionError, DomainError


class TestJet2(unittest.TestCase):

    def test_product_rule(self):
        x, y = lift_point([2.0, 3.0])
        f = x * x * y
        self.assertAlmostEqual(f.value, 12.0)
        np.testing.assert_allclose(f.grad, [12.0, 4.0])
        np.testing.assert_allclose(f.hess, [[6.0, 4.0], [4.0, 0.0]])

    def test_quotient_and_power(self):
        x, y = lift_point([1.5, -0.5])
        f = (x ** 3) / y
        # ∂x = 3x²/y, ∂y = −x³/y²
        np.testing.assert_allclose(f.grad, [3 * 1.5 ** 2 / -0.5, -(1.5 ** 3) / 0.25])
        g = x ** -2
        np.testing.assert_allclose(g.hess[0, 0], 6.0 / 1.5 ** 4)

    def test_transcendental_chain_rule(self):
        (x,) = lift_point([0.3])
        f = (x * 2.0).sin().exp()
        expected = cmath.exp(cmath.sin(0.6)) * 2 * cmath.cos(0.6)
        self.assertAlmostEqual(complex(f.grad[0]), expected)
        g = (x * x + 1.0).sqrt()
        self.assertAlmostEqual(complex(g.grad[0]), 0.3 / cmath.sqrt(1.09))

    def test_complex_seed_and_conjugate(self):
        re, im = lift_point([1.0, 2.0])
        u = complex_seed(re, im)
        self.assertEqual(u.value, 1 + 2j)
        w = u * u.conjugate()
        # |u|² = x² + y²
        np.testing.assert_allclose(w.grad, [2.0, 4.0])
        np.testing.assert_allclose(u.imag().grad, [0.0, 1.0])

    def test_abs(self):
        re, im = lift_point([3.0, 4.0])
        r = complex_seed(re, im).abs()
        self.assertAlmostEqual(r.value, 5.0)
        np.testing.assert_allclose(r.grad, [0.6, 0.8])
        np.testing.assert_allclose(r.hess, [[16 / 125, -12 / 125], [-12 / 125, 9 / 125]], atol=1e-12)

    def test_singular_operations(self):
        (x,) = lift_point([0.0])
        with self.assertRaises(DomainError):
            x.reciprocal()
        with self.assertRaises(DomainError):
            x.sqrt()
        with self.assertRaises(DomainError):
            x.log()
        with self.assertRaises(DomainError):
            x ** -1
        with self.assertRaises(DomainError):
            Jet2.constant(1.0, 1) / 0.0

    def test_integer_powers_only(self):
        (x,) = lift_point([2.0])
        with self.assertRaises(TypeError):
            x ** 0.5

    def test_jet_arith(self):
        a, b = lift_point([1.0, 2.0])
        self.assertAlmostEqual(jet_arith("div", a, b).value, 0.5)
        with self.assertRaises(ValueError):
            jet_arith("tan", a)
        (c,) = lift_point([1.0])
        with self.assertRaises(DimensionError):
            jet_arith("add", a, c)


class TestFiniteDifferences(unittest.TestCase):

    def test_matches_jets(self):
        p = np.array([0.4, -1.2, 2.5])
        f = lambda v: np.sin(v[0]) * v[1] ** 2 + np.exp(0.1 * v[2]) * v[0]
        x, y, z = lift_point(p)
        jet = x.sin() * y * y + (z * 0.1).exp() * x
        grad, hess = fd_derivatives(f, p)
        np.testing.assert_allclose(grad, np.real(jet.grad), rtol=1e-7, atol=1e-8)
        np.testing.assert_allclose(hess, np.real(jet.hess), rtol=1e-4, atol=1e-4)

    def test_vector_valued(self):
        grad = fd_gradient(lambda v: np.array([v[0] * v[1], v[1]]), [2.0, 3.0])
        np.testing.assert_allclose(grad, [[3.0, 2.0], [0.0, 1.0]], atol=1e-8)

    def test_errors_propagate(self):
        def failing(_):
            raise DomainError("fora do domínio")
        with self.assertRaises(DomainError):
            fd_derivatives(failing, [0.0])


if __name__ == "__main__":
    unittest.main()
