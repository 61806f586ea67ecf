import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import unittest
import numpy as np
from src.exprlang import parse
from src.oracle import jet_discrepancy, quaternion_law_residual, random_expression

COORDS = ("x1", "x2", "x3")


class TestJetOracle(unittest.TestCase):

    def test_random_expressions_are_reproducible(self):
        a = random_expression(np.random.default_rng(11), COORDS)
        b = random_expression(np.random.default_rng(11), COORDS)
        self.assertEqual(a, b)
        self.assertTrue(a.variables() <= set(COORDS))

    def test_random_expressions_agree_with_differences(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            e = random_expression(rng, COORDS)
            p = rng.uniform(-1.0, 1.0, 3)
            grad_err, hess_err = jet_discrepancy(e, COORDS, p)
            self.assertLess(grad_err, 1e-6, e.render())
            self.assertLess(hess_err, 1e-4, e.render())

    def test_known_expression(self):
        grad_err, hess_err = jet_discrepancy(parse("x1*exp(x2) - sin(x3)"), COORDS, [0.3, -0.2, 0.5])
        self.assertLess(grad_err, 1e-7)
        self.assertLess(hess_err, 1e-4)


class TestQuaternionLaws(unittest.TestCase):

    def test_laws_hold(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            self.assertLess(quaternion_law_residual(rng.uniform(-2.0, 2.0, 12)), 1e-12)

    def test_unit_quaternions(self):
        values = [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0]
        self.assertEqual(quaternion_law_residual(values), 0.0)


if __name__ == "__main__":
    unittest.main()
