import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import math
import unittest
import numpy as np
from src.autodiff import fd_gradient
from src.errors import DegenerateSpan, DimensionError, DomainError, OutOfDomain, SingularMetric
from src.geometry import (CallableField, ExpressionField, LeviCivitaField, MetricChart, check_positive_definite,
                          christoffel, covariant_derivative, curvature, einstein_residual, flat_metric, form_norm,
                          frobenius_residual, hodge_star, orthonormal_frame, scalar_curvature, weyl_split)

HYPERBOLIC4 = MetricChart.diagonal(["a", "b", "c", "w"], ["w^(-2)"] * 4, guard="w > 0", name="hyperbolic4")
SPHERE4 = MetricChart.diagonal(["x1", "x2", "x3", "x4"],
                               ["4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2"] * 4, name="sphere4")
EGUCHI_HANSON = MetricChart.from_strings(
    ["r", "theta", "phi", "psi"],
    [["1/(1 - r^-4)", "0", "0", "0"],
     ["0", "r^2/4", "0", "0"],
     ["0", "0", "r^2/4*sin(theta)^2 + r^2/4*(1 - r^-4)*cos(theta)^2", "r^2/4*(1 - r^-4)*cos(theta)"],
     ["0", "0", "r^2/4*(1 - r^-4)*cos(theta)", "r^2/4*(1 - r^-4)"]],
    guard="r > 1 and sin(theta) > 0", name="eguchi-hanson")
GENERIC3 = MetricChart.from_strings(
    ["x", "y", "z"],
    [["1 + x^2", "x*y", "0"],
     ["x*y", "2", "0.3"],
     ["0", "0.3", "1 + z^2"]], name="generic3")


def eguchi_hanson_point(rng):
    return [rng.uniform(1.3, 2.5), rng.uniform(0.4, 2.7), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)]


class TestMetricChart(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(DimensionError):
            flat_metric(["x"])
        with self.assertRaises(DimensionError):
            MetricChart.diagonal(["x", "y"], ["1"])
        with self.assertRaises(DomainError):
            MetricChart.from_strings(["x", "y"], [["1", "x"], ["y", "1"]])
        with self.assertRaises(ValueError):
            flat_metric(["x", "y"], orientation=2)

    def test_guard(self):
        self.assertTrue(HYPERBOLIC4.contains([0, 0, 0, 1]))
        with self.assertRaises(OutOfDomain):
            HYPERBOLIC4.at([0, 0, 0, -1])
        with self.assertRaises(DimensionError):
            HYPERBOLIC4.at([0, 0, 1])

    def test_positive_definite(self):
        with self.assertRaises(DomainError):
            check_positive_definite(np.diag([1.0, -1.0]))
        with self.assertRaises(SingularMetric):
            check_positive_definite(np.diag([1.0, 0.0]))
        with self.assertRaises(SingularMetric):
            MetricChart.diagonal(["x", "y"], ["1", "x^2"]).at([0.0, 1.0])

    def test_conformal_rescaling(self):
        g = flat_metric(["x", "y"]).conformal("x")
        np.testing.assert_allclose(g.at([0.5, 0.0]), math.exp(1.0) * np.eye(2))


class TestCurvature(unittest.TestCase):

    def test_polar_christoffel(self):
        polar = MetricChart.diagonal(["r", "th"], ["1", "r^2"], guard="r > 0")
        gamma = christoffel(polar, [2.0, 0.3]).gamma
        self.assertAlmostEqual(gamma[0, 1, 1], -2.0)
        self.assertAlmostEqual(gamma[1, 0, 1], 0.5)
        self.assertAlmostEqual(gamma[1, 1, 0], 0.5)
        self.assertTrue(christoffel(polar, [2.0, 0.3]).is_symmetric(1e-14))
        self.assertAlmostEqual(scalar_curvature(polar, [2.0, 0.3]), 0.0, places=12)

    def test_round_two_sphere(self):
        sphere = MetricChart.diagonal(["th", "ph"], ["1", "sin(th)^2"], guard="sin(th) > 0")
        for p in ([0.4, 0.0], [1.2, 2.0], [2.5, -1.0]):
            self.assertAlmostEqual(scalar_curvature(sphere, p), 2.0, places=9)

    def test_space_forms(self):
        for p in ([0.1, -0.3, 0.2, 0.7], [0.5, 0.5, -0.5, 1.8]):
            self.assertAlmostEqual(scalar_curvature(HYPERBOLIC4, p), -12.0, places=8)
            self.assertLess(einstein_residual(HYPERBOLIC4, p), 1e-8)
            self.assertLess(weyl_split(HYPERBOLIC4, p).norm, 1e-8)
        p = [0.3, -0.2, 0.6, 0.1]
        self.assertAlmostEqual(scalar_curvature(SPHERE4, p), 12.0, places=8)
        self.assertLess(weyl_split(SPHERE4, p).norm, 1e-8)

    def test_ricci_of_sphere(self):
        # Ric = 3g na 4-esfera redonda
        p = [0.2, 0.1, -0.4, 0.3]
        curv = curvature(LeviCivitaField(SPHERE4), p, SPHERE4)
        np.testing.assert_allclose(curv.symmetric_ricci, 3.0 * SPHERE4.at(p), atol=1e-9)
        self.assertAlmostEqual(curv.scalar, 12.0, places=8)

    def test_eguchi_hanson_is_half_flat(self):
        p = [1.7, 1.1, 0.3, 0.2]
        self.assertLess(einstein_residual(EGUCHI_HANSON, p), 1e-7)
        self.assertAlmostEqual(scalar_curvature(EGUCHI_HANSON, p), 0.0, places=7)
        split = weyl_split(EGUCHI_HANSON, p)
        self.assertGreater(split.norm, 1e-2)
        self.assertLess(min(split.self_dual, split.anti_self_dual), 1e-7)
        # trocar a orientação troca as partes
        flipped = weyl_split(EGUCHI_HANSON.with_orientation(-1), p)
        self.assertAlmostEqual(flipped.self_dual, split.anti_self_dual, places=9)
        self.assertAlmostEqual(flipped.anti_self_dual, split.self_dual, places=9)

    def test_weyl_split_needs_dimension_four(self):
        with self.assertRaises(DimensionError):
            weyl_split(flat_metric(["x", "y", "z"]), [0, 0, 0])

    def test_levi_civita_is_metric(self):
        p = [0.3, -0.2, 0.6, 0.1]
        np.testing.assert_allclose(covariant_derivative(SPHERE4, LeviCivitaField(SPHERE4), p), 0.0, atol=1e-12)

    def test_first_bianchi_identity(self):
        rng = np.random.default_rng(5)
        cases = [(GENERIC3, lambda: rng.uniform(-0.5, 0.5, 3)),
                 (SPHERE4, lambda: rng.uniform(-1.0, 1.0, 4)),
                 (EGUCHI_HANSON, lambda: eguchi_hanson_point(rng))]
        for g, point in cases:
            for _ in range(5):
                r = curvature(LeviCivitaField(g), point()).riemann
                # R^i_jkl + R^i_klj + R^i_ljk
                cyclic = r + np.einsum("iklj->ijkl", r) + np.einsum("iljk->ijkl", r)
                self.assertLess(np.max(np.abs(cyclic)), 1e-8, g.name)

    def test_christoffel_derivatives_match_differences(self):
        for g, p in ((GENERIC3, [0.3, -0.2, 0.4]), (EGUCHI_HANSON, [1.7, 1.1, 0.3, 0.2])):
            exact = christoffel(g, p).dgamma
            sampled = fd_gradient(lambda q: christoffel(g, q).gamma, p)
            np.testing.assert_allclose(exact, sampled, atol=1e-5)

    def test_weyl_norm_has_conformal_weight(self):
        # |W| de e^{2ω}g é e^{-2ω} vezes o de g
        omega = "0.2*r*cos(phi) + 0.1*sin(psi) - 0.05*theta^2"
        rescaled = EGUCHI_HANSON.conformal(omega)
        for p in ([1.7, 1.1, 0.3, 0.2], [2.2, 0.6, -0.8, 0.5], [1.4, 2.3, 0.9, -0.7]):
            r, theta, phi, psi = p
            weight = math.exp(2.0 * (0.2 * r * math.cos(phi) + 0.1 * math.sin(psi) - 0.05 * theta ** 2))
            base = weyl_split(EGUCHI_HANSON, p).as_tuple()
            for a, b in zip(weyl_split(rescaled, p).as_tuple(), base):
                self.assertAlmostEqual(a * weight, b, delta=1e-6)


class TestForms(unittest.TestCase):

    def test_hodge_star_flat(self):
        g = flat_metric(["x1", "x2", "x3", "x4"])
        form = np.zeros((4, 4))
        form[0, 1], form[1, 0] = 1.0, -1.0
        star = hodge_star(g, [0, 0, 0, 0], form, 2)
        self.assertAlmostEqual(star[2, 3], 1.0)
        self.assertAlmostEqual(star[3, 2], -1.0)
        reversed_star = hodge_star(g.with_orientation(-1), [0, 0, 0, 0], form, 2)
        self.assertAlmostEqual(reversed_star[2, 3], -1.0)
        # ** = 1 em 2-formas de dimensão 4
        np.testing.assert_allclose(hodge_star(g, [0, 0, 0, 0], star, 2), form)

    def test_hodge_star_three_dimensions(self):
        g = flat_metric(["x", "y", "z"])
        star = hodge_star(g, [0, 0, 0], np.array([1.0, 0.0, 0.0]), 1)
        self.assertAlmostEqual(star[1, 2], 1.0)
        self.assertAlmostEqual(hodge_star(g, [0, 0, 0], star, 2)[0], 1.0)
        with self.assertRaises(DimensionError):
            hodge_star(g, [0, 0, 0], np.zeros((3, 3, 3)), 3)

    def test_hodge_star_is_isometry(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            p = eguchi_hanson_point(rng)
            metric = EGUCHI_HANSON.at(p)
            a = rng.normal(size=(4, 4))
            form = a - a.T
            star = hodge_star(EGUCHI_HANSON, p, form, 2)
            norm = form_norm(metric, form, 2)
            self.assertAlmostEqual(form_norm(metric, star, 2), norm, delta=1e-10 * max(1.0, norm))
            np.testing.assert_allclose(hodge_star(EGUCHI_HANSON, p, star, 2), form, atol=1e-10)
        # 1-formas em dimensão 3, métrica não diagonal
        p = [0.3, -0.2, 0.4]
        covector = np.array([0.7, -1.2, 0.5])
        star = hodge_star(GENERIC3, p, covector, 1)
        metric = GENERIC3.at(p)
        self.assertAlmostEqual(form_norm(metric, star, 2), form_norm(metric, covector, 1), delta=1e-10)

    def test_form_norm(self):
        form = np.zeros((3, 3))
        form[0, 1], form[1, 0] = 1.0, -1.0
        self.assertAlmostEqual(form_norm(np.eye(3), form, 2), 1.0)
        self.assertAlmostEqual(form_norm(4.0 * np.eye(3), np.array([2.0, 0.0, 0.0]), 1), 1.0)

    def test_orthonormal_frame(self):
        g = np.array([[2.0, 0.5], [0.5, 1.0]])
        frame = orthonormal_frame(g)
        np.testing.assert_allclose(frame.T @ g @ frame, np.eye(2), atol=1e-12)
        self.assertGreater(np.linalg.det(frame), 0.0)


class TestDistributions(unittest.TestCase):

    def test_integrable_span(self):
        fields = [ExpressionField.from_strings(["x", "y", "z"], ["1", "0", "0"]),
                  ExpressionField.from_strings(["x", "y", "z"], ["0", "1", "x"])]
        # [∂x, ∂y + x∂z] = ∂z, fora do plano gerado
        self.assertAlmostEqual(frobenius_residual(fields, [0.0, 0.2, 0.3]), 1.0)
        radial = [ExpressionField.from_strings(["x", "y", "z"], ["x", "y", "z"]),
                  ExpressionField.from_strings(["x", "y", "z"], ["-y", "x", "0"])]
        self.assertLess(frobenius_residual(radial, [0.5, 0.2, -0.4]), 1e-14)

    def test_degenerate_span(self):
        fields = [ExpressionField.from_strings(["x", "y"], ["1", "0"]),
                  CallableField(2, lambda p: (np.array([2.0, 0.0]), np.zeros((2, 2))))]
        with self.assertRaises(DegenerateSpan):
            frobenius_residual(fields, [0.0, 0.0])


if __name__ == "__main__":
    unittest.main()
