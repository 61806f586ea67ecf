import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import unittest
import numpy as np
from src.errors import DimensionError
from src.exprlang import evaluate, parse
from src.geometry import MetricChart, flat_metric
from src.weyl import (WeylStructure, covariant_derivative_of_metric, einstein_weyl_residual, gauge_transform,
                      weyl_connection, weyl_scalar)

ROUND = WeylStructure(MetricChart.diagonal(["x1", "x2", "x3"], ["4/(1 + x1^2 + x2^2 + x3^2)^2"] * 3),
                      ("0", "0", "0"), name="round-s3")
# a esfera redonda no calibre em que h é plano
ROUND_FLAT_GAUGE = WeylStructure(flat_metric(["x1", "x2", "x3"]),
                                 tuple(f"-2*{x}/(1 + x1^2 + x2^2 + x3^2)" for x in ("x1", "x2", "x3")))


class TestWeylStructure(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(DimensionError):
            WeylStructure(flat_metric(["x", "y"]), ("0", "0", "0"))
        with self.assertRaises(DimensionError):
            WeylStructure(flat_metric(["x", "y", "z"]), ("0", "0"))

    def test_is_metric(self):
        self.assertTrue(ROUND.is_metric())
        self.assertFalse(ROUND_FLAT_GAUGE.is_metric())

    def test_exterior_derivative(self):
        closed = WeylStructure(flat_metric(["x", "y", "z"]), ("y", "x", "0"))
        d_alpha = closed.exterior_derivative()
        self.assertEqual(evaluate(d_alpha[0][1], {}), 0)
        twisted = WeylStructure(flat_metric(["x", "y", "z"]), ("-y", "x", "0"))
        self.assertEqual(evaluate(twisted.exterior_derivative()[0][1], {}), 2)


class TestWeylConnection(unittest.TestCase):

    def test_round_sphere(self):
        for p in ([0.1, 0.2, 0.3], [-0.7, 0.5, 0.9]):
            self.assertAlmostEqual(weyl_scalar(ROUND, p), 6.0, places=9)
            self.assertLess(einstein_weyl_residual(ROUND, p), 1e-9)

    def test_flat_gauge_scalar_transforms(self):
        # s(e^{2ω}h) = e^{-2ω} s(h) com e^{2ω} = (1 + |x|²)²/4
        p = [0.3, -0.4, 0.5]
        r2 = sum(x * x for x in p)
        self.assertAlmostEqual(weyl_scalar(ROUND_FLAT_GAUGE, p), 24.0 / (1.0 + r2) ** 2, places=9)
        self.assertLess(einstein_weyl_residual(ROUND_FLAT_GAUGE, p), 1e-9)

    def test_gauge_invariance(self):
        p = [0.2, -0.1, 0.6]
        moved = gauge_transform(ROUND, "x1*x2 + x3/3")
        np.testing.assert_allclose(weyl_connection(moved, p).gamma, weyl_connection(ROUND, p).gamma, atol=1e-12)
        self.assertAlmostEqual(einstein_weyl_residual(moved, p), 0.0, places=9)

    def test_gauge_transform_scalar(self):
        declared = WeylStructure(ROUND.h, ROUND.alpha, scalar=parse("6"))
        moved = gauge_transform(declared, "x1")
        p = [0.5, 0.0, 0.0]
        self.assertAlmostEqual(evaluate(moved.scalar, {"x1": 0.5}), 6.0 * np.exp(-1.0))
        self.assertAlmostEqual(weyl_scalar(moved, p), 6.0 * np.exp(-1.0), places=9)

    def test_non_einstein_weyl(self):
        # α = dx1 com h plano equivale à métrica e^{2 x1} δ, que não é Einstein
        W = WeylStructure(flat_metric(["x1", "x2", "x3"]), ("1", "0", "0"))
        self.assertGreater(einstein_weyl_residual(W, [0.1, 0.2, 0.3]), 1e-2)

    def test_metric_compatibility(self):
        # D h = −2 α ⊗ h
        p = [0.3, -0.2, 0.4]
        dh = covariant_derivative_of_metric(ROUND_FLAT_GAUGE, p)
        alpha, _ = ROUND_FLAT_GAUGE.lee_jets(p)
        expected = -2.0 * np.einsum("k,ij->kij", alpha, np.eye(3))
        np.testing.assert_allclose(dh, expected, atol=1e-12)


if __name__ == "__main__":
    unittest.main()
