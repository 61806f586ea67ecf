import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import math
import unittest
from unittest.mock import MagicMock
import numpy as np
from src.calderbank import (_resolve_scalar, anti_self_dual_orientation, calderbank_metric, compose_extension,
                            interval_bound, pole_check, retract, retract_verdict, star_of_exterior_derivative,
                            surface_target)
from src.errors import DomainError, IntervalViolation, OutOfDomain
from src.exprlang import evaluate, parse
from src.geometry import MetricChart, einstein_residual, flat_metric, scalar_curvature, weyl_split
from src.maps import ExpressionMap, harmonic_morphism_verdict, hwc_residual
from src.sampling import Box
from src.weyl import WeylStructure

BASE = ["x1", "x2", "x3"]
FLAT = WeylStructure(flat_metric(BASE), ("0", "0", "0"), Box((-1.0,) * 3, (1.0,) * 3), name="flat")
ROUND = WeylStructure(MetricChart.diagonal(BASE, ["4/(1 + x1^2 + x2^2 + x3^2)^2"] * 3), ("0", "0", "0"),
                      Box((-1.0,) * 3, (1.0,) * 3), parse("6"), name="round")
HYPERBOLIC = WeylStructure(MetricChart.diagonal(BASE, ["x3^-2"] * 3, guard="x3 > 0"), ("0", "0", "0"),
                           Box((-1.0, -1.0, 0.5), (1.0, 1.0, 2.0)), parse("-6"), name="hyperbolic")


def quiet_logger():
    return MagicMock()


class TestConstruction(unittest.TestCase):

    def test_interval_bound(self):
        self.assertEqual(interval_bound(6.0), 1.0)
        self.assertEqual(interval_bound(0.0), math.inf)
        self.assertEqual(interval_bound(-6.0), math.inf)

    def test_declared_scalar_uses_admissible_samples(self):
        # x1^2 dx1^2 é plana fora de x1 = 0, onde a métrica degenera e x1/x1 não avalia
        W = WeylStructure(MetricChart.diagonal(BASE, ["x1^2", "1", "1"]), ("0", "0", "0"),
                          scalar=parse("x1/x1"), name="degenerate")
        logger = quiet_logger()
        points = np.array([[0.5, 0.1, 0.2], [0.0, 0.3, 0.1], [-0.7, 0.2, 0.4]])
        _, s_max = _resolve_scalar(W, points, logger)
        self.assertEqual(s_max, 1.0)
        levels = [c.args[1] for c in logger.println.call_args_list]
        self.assertEqual(levels.count("WARNING"), 1)

    def test_star_of_exterior_derivative(self):
        self.assertEqual([evaluate(c, {}) for c in star_of_exterior_derivative(FLAT)], [0, 0, 0])
        twisted = WeylStructure(flat_metric(BASE), ("-x2", "x1", "0"))
        star = [evaluate(c, {"x1": 0.3, "x2": 0.1, "x3": -0.2}) for c in star_of_exterior_derivative(twisted)]
        np.testing.assert_allclose(star, [0.0, 0.0, 2.0])

    def test_constant_scalar_is_sampled(self):
        H = calderbank_metric(WeylStructure(ROUND.h, ROUND.alpha, ROUND.domain, name="round"), 16,
                              logger=quiet_logger())
        self.assertAlmostEqual(evaluate(H.scalar, {}).real, 6.0, places=8)
        self.assertAlmostEqual(H.t_max, 1.0, places=8)
        flat = calderbank_metric(FLAT, 16, logger=quiet_logger())
        self.assertEqual(evaluate(flat.scalar, {}), 0)
        self.assertEqual(flat.t_max, math.inf)

    def test_non_constant_scalar_needs_declaration(self):
        bumpy = WeylStructure(MetricChart.diagonal(BASE, ["1 + x1^2"] * 3), ("0", "0", "0"), name="bumpy")
        with self.assertRaises(DomainError):
            calderbank_metric(bumpy, 16, logger=quiet_logger())

    def test_declared_scalar_mismatch_warns(self):
        logger = quiet_logger()
        wrong = WeylStructure(FLAT.h, FLAT.alpha, FLAT.domain, parse("1"), name="wrong")
        H = calderbank_metric(wrong, 8, logger=logger)
        self.assertAlmostEqual(H.t_max, math.sqrt(6.0))
        levels = [c.args[1] for c in logger.println.call_args_list]
        self.assertIn("WARNING", levels)

    def test_non_einstein_weyl_warns(self):
        # α = dx1 sobre h plano: S = −2 constante, mas não é Einstein–Weyl
        logger = quiet_logger()
        H = calderbank_metric(WeylStructure(flat_metric(BASE), ("1", "0", "0"), name="tilted"), 8, logger=logger)
        self.assertAlmostEqual(evaluate(H.scalar, {}).real, -2.0, places=8)
        messages = [c.args[0] for c in logger.println.call_args_list if c.args[1] == "WARNING"]
        self.assertTrue(any("Einstein" in m for m in messages))


class TestHSpaces(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.flat = calderbank_metric(FLAT, 16, logger=quiet_logger())
        cls.round = calderbank_metric(ROUND, 16, logger=quiet_logger())
        cls.hyperbolic = calderbank_metric(HYPERBOLIC, 16, logger=quiet_logger())

    def test_all_three_are_hyperbolic(self):
        cases = ((self.flat, [0.4, 0.3, -0.2, 0.5]), (self.round, [0.5, 0.3, -0.2, 0.5]),
                 (self.hyperbolic, [0.4, 0.3, -0.2, 1.2]))
        for H, p in cases:
            self.assertAlmostEqual(scalar_curvature(H.g, p), -12.0, places=7)
            self.assertLess(einstein_residual(H.g, p), 1e-7)
            self.assertLess(weyl_split(H.g, p).norm, 1e-7)

    def test_interval(self):
        with self.assertRaises(IntervalViolation):
            self.flat.require([0.0, 0.0, 0.0, 0.0])
        with self.assertRaises(IntervalViolation):
            self.round.require([1.0, 0.0, 0.0, 0.0])
        with self.assertRaises(OutOfDomain):
            self.round.require([1.5, 0.0, 0.0, 0.0])
        with self.assertRaises(OutOfDomain):
            self.hyperbolic.require([0.5, 0.0, 0.0, -1.0])

    def test_pole_of_order_two(self):
        self.assertLess(pole_check(self.flat, [0.2, -0.3, 0.1]), 1e-12)
        self.assertLess(pole_check(self.round, [0.2, -0.3, 0.1]), 1e-6)
        self.assertLess(pole_check(self.hyperbolic, [0.2, -0.3, 1.1]), 1e-6)

    def test_retract_is_harmonic_morphism(self):
        points = [[0.2, 0.1, 0.5, -0.3], [0.7, -0.8, 0.2, 0.9], [0.4, 0.0, 0.0, 0.0]]
        report = retract_verdict(self.flat, points)
        self.assertTrue(report.passed)
        np.testing.assert_allclose(report.checks[0].extras["dilation"], [t * t for t, *_ in points], atol=1e-12)
        round_report = retract_verdict(self.round, points)
        self.assertTrue(round_report.passed)
        np.testing.assert_allclose(round_report.checks[0].extras["dilation"],
                                   [t * t / (1 - t * t) for t, *_ in points], atol=1e-10)

    def test_retract_coordinates(self):
        psi = retract(self.flat)
        np.testing.assert_allclose(psi([0.3, 1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])
        self.assertEqual(psi.coords, ("t", "x1", "x2", "x3"))

    def test_extensions(self):
        target, connection = surface_target()
        linear = compose_extension(ExpressionMap(BASE, ["x1 + i*x2"], complex_valued=True), self.flat)
        points = [[0.2, 0.1, 0.5, -0.3], [0.7, -0.8, 0.2, 0.9]]
        self.assertTrue(harmonic_morphism_verdict(linear, self.flat.g, connection, target, points).passed)
        rotational = ExpressionMap(BASE, ["x1 + i*sqrt(x2^2 + x3^2)"], complex_valued=True)
        extension = compose_extension(rotational, self.hyperbolic)
        points = [[0.3, 0.1, 0.5, 0.8], [0.9, -0.4, 0.2, 1.7]]
        self.assertTrue(harmonic_morphism_verdict(extension, self.hyperbolic.g, connection, target, points, 1e-8).passed)
        # sobre a base plana a extensão rotacional não é harmônica
        flat_extension = compose_extension(rotational, self.flat)
        self.assertFalse(harmonic_morphism_verdict(flat_extension, self.flat.g, connection, target, points).passed)
        self.assertLess(hwc_residual(flat_extension, self.flat.g, target, points[0])[1], 1e-12)
        with self.assertRaises(DomainError):
            compose_extension(ExpressionMap(["a", "b", "c", "d"], ["a", "b"]), self.flat)

    def test_conformally_flat_orientation(self):
        self.assertEqual(anti_self_dual_orientation(self.flat, [[0.5, 0.1, 0.2, 0.3]]), 1)


if __name__ == "__main__":
    unittest.main()
