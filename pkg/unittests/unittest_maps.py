import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import math
import unittest
import numpy as np
from src.autodiff import fd_derivatives, fd_gradient
from src.errors import DimensionError, NotAlmostComplex, NotHorizontallyConformal, NotSubmersive, OutOfDomain
from src.geometry import LeviCivitaField, MetricChart, flat_metric
from src.maps import (STANDARD_J, ComposedMap, ConstantComplexStructure, ExpressionMap, HermitianStructureField,
                      SampledComplexStructure, SliceMap, differential, harmonic_morphism_verdict,
                      hermitian_from_submersion, hwc_residual, nijenhuis_residual, orientation_count,
                      orientation_residuals, projection_map, tension_field)

R3 = ["x1", "x2", "x3"]
R4 = ["x1", "x2", "x3", "x4"]
PLANE = flat_metric(["w_re", "w_im"])
HYPERBOLIC3 = MetricChart.diagonal(R3, ["x3^-2"] * 3, guard="x3 > 0")
ROTATIONAL = ExpressionMap(R3, ["x1 + i*sqrt(x2^2 + x3^2)"], complex_valued=True)
HYPERBOLIC_SAMPLES = [[0.1, 0.3, 0.4], [-0.5, -0.2, 1.5], [0.9, 0.8, 0.7]]


def levi_civita_by_differences(g, p):
    """Γ^k_ij a partir de diferenças centrais da métrica."""
    dg = fd_gradient(g.at, p)
    ginv = np.linalg.inv(g.at(p))
    return 0.5 * (np.einsum("kl,jli->kij", ginv, dg) + np.einsum("kl,ilj->kij", ginv, dg)
                  - np.einsum("kl,ijl->kij", ginv, dg))


def tension_by_differences(f, g_M, g_N, p):
    jac, hess = fd_derivatives(f.value, p, 1e-4)
    gamma_m = levi_civita_by_differences(g_M, p)
    gamma_n = levi_civita_by_differences(g_N, f.value(p))
    second = hess - np.einsum("kij,ak->aij", gamma_m, jac) + np.einsum("abc,bi,cj->aij", gamma_n, jac, jac)
    return np.einsum("ij,aij->a", np.linalg.inv(g_M.at(p)), second)


class TestMapCharts(unittest.TestCase):

    def test_complex_components(self):
        f = ExpressionMap(["x", "y"], ["(x + i*y)^2"], complex_valued=True)
        value, jac, hess = f.jets([1.0, 2.0])
        np.testing.assert_allclose(value, [-3.0, 4.0])
        np.testing.assert_allclose(jac, [[2.0, -4.0], [4.0, 2.0]])
        np.testing.assert_allclose(hess[1], [[0.0, 2.0], [2.0, 0.0]])

    def test_guard(self):
        f = ExpressionMap(R3, ["x1", "x2"], guard="x3 > 0")
        with self.assertRaises(OutOfDomain):
            f([0.0, 0.0, -1.0])
        with self.assertRaises(DimensionError):
            f([0.0, 0.0])

    def test_composition_chain_rule(self):
        inner = ExpressionMap(["s", "t"], ["s*t", "s + t"])
        outer = ExpressionMap(["a", "b"], ["a^2 + b", "a*b"])
        composed = ComposedMap(outer, inner)
        direct = ExpressionMap(["s", "t"], ["(s*t)^2 + s + t", "s*t*(s + t)"])
        p = [0.7, -1.1]
        for a, b in zip(composed.jets(p), direct.jets(p)):
            np.testing.assert_allclose(a, b, atol=1e-12)
        with self.assertRaises(DimensionError):
            ComposedMap(ExpressionMap(R3, ["x1"]), inner)

    def test_slice(self):
        base = ExpressionMap(R4, ["x1 + x4^2", "x2*x4"])
        sliced = SliceMap(base, 3, 2.0)
        self.assertEqual(sliced.coords, ("x1", "x2", "x3"))
        value, jac, _ = sliced.jets([1.0, 3.0, 0.0])
        np.testing.assert_allclose(value, [5.0, 6.0])
        np.testing.assert_allclose(jac, [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
        with self.assertRaises(DimensionError):
            SliceMap(base, 4)

    def test_differential_rank(self):
        f = ExpressionMap(R3, ["x1", "x1^2"])
        self.assertFalse(differential(f, [0.5, 0.0, 0.0]).surjective)
        self.assertTrue(differential(projection_map(R3, ["x1", "x2"]), [0.5, 0.0, 0.0]).surjective)


class TestHarmonicMorphisms(unittest.TestCase):

    def test_projection_is_harmonic_morphism(self):
        f = projection_map(R3, ["x1", "x2"])
        points = np.random.default_rng(1).uniform(-1, 1, (10, 3))
        report = harmonic_morphism_verdict(f, flat_metric(R3), LeviCivitaField(PLANE), PLANE, points)
        self.assertTrue(report.passed)
        self.assertEqual(report.checks[0].extras["dilation"], [1.0] * 10)

    def test_harmonic_but_not_conformal(self):
        f = ExpressionMap(["x", "y"], ["x^2 - y^2", "x*y"])
        lam, residual = hwc_residual(f, flat_metric(["x", "y"]), PLANE, [0.3, 0.4])
        self.assertGreater(residual, 1e-2)
        np.testing.assert_allclose(tension_field(f, flat_metric(["x", "y"]), LeviCivitaField(PLANE), [0.3, 0.4]),
                                   0.0, atol=1e-12)

    def test_critical_point_is_weakly_conformal(self):
        f = ExpressionMap(["x", "y"], ["x^2", "y^2"])
        self.assertEqual(hwc_residual(f, flat_metric(["x", "y"]), PLANE, [0.0, 0.0]), (0.0, 0.0))

    def test_rotational_map_needs_hyperbolic_base(self):
        f = ExpressionMap(R3, ["x1 + i*sqrt(x2^2 + x3^2)"], complex_valued=True)
        p = [0.1, 0.3, 0.4]
        # no R³ plano, Δ|(x2, x3)| = 1/|(x2, x3)| = 2
        tau = tension_field(f, flat_metric(R3), LeviCivitaField(PLANE), p)
        np.testing.assert_allclose(tau, [0.0, 2.0], atol=1e-12)
        self.assertLess(hwc_residual(f, flat_metric(R3), PLANE, p)[1], 1e-12)
        # em x3⁻²δ o termo de primeira ordem cancela a curvatura das fibras
        samples = [[0.1, 0.3, 0.4], [-0.5, -0.2, 1.5], [0.9, 0.8, 0.7]]
        report = harmonic_morphism_verdict(f, HYPERBOLIC3, LeviCivitaField(PLANE), PLANE, samples, 1e-9)
        self.assertTrue(report.passed)

    def test_sample_errors_fail_the_check(self):
        f = ExpressionMap(R3, ["x1 + i*sqrt(x2^2 + x3^2)"], complex_valued=True)
        report = harmonic_morphism_verdict(f, HYPERBOLIC3, LeviCivitaField(PLANE), PLANE,
                                           [[0.1, 0.3, 0.4], [0.1, 0.3, -0.4]])
        check = report.checks[0]
        self.assertFalse(check.passed)
        self.assertEqual(len(check.errors), 1)

    def test_overflow_is_recorded_per_sample(self):
        f = ExpressionMap(R3, ["exp(1000*x1) + i*x2"], complex_valued=True)
        report = harmonic_morphism_verdict(f, flat_metric(R3), LeviCivitaField(PLANE), PLANE,
                                           [[0.0, 0.1, 0.2], [1.0, 0.1, 0.2]])
        check = report.checks[0]
        self.assertFalse(check.passed)
        self.assertEqual(check.errors, [{"point": [1.0, 0.1, 0.2], "kind": "DomainError"}])
        # a primeira amostra ainda conta: Δ exp(1000*x1) = 1e6 em x1 = 0
        self.assertAlmostEqual(check.extras["max_tension"], 1e6, delta=1.0)

    def test_tension_matches_differences(self):
        f = ExpressionMap(R3, ["x1*x2 + x3", "sin(x1) + x2^2"])
        g_N = MetricChart.diagonal(["w_re", "w_im"], ["1 + w_re^2", "exp(w_im)"])
        for p in ([0.3, -0.4, 1.2], [0.7, 0.2, 0.6], [-0.5, 0.9, 1.5]):
            np.testing.assert_allclose(tension_field(f, HYPERBOLIC3, LeviCivitaField(g_N), p),
                                       tension_by_differences(f, HYPERBOLIC3, g_N, p), atol=1e-5)

    def test_verdict_is_target_conformally_invariant(self):
        rescaled = PLANE.conformal("0.3*w_re - 0.2*w_im^2")
        points = np.random.default_rng(3).uniform(-1, 1, (10, 3))
        for target in (PLANE, rescaled):
            report = harmonic_morphism_verdict(ROTATIONAL, HYPERBOLIC3, LeviCivitaField(target), target,
                                               HYPERBOLIC_SAMPLES, 1e-8)
            self.assertTrue(report.passed)
            report = harmonic_morphism_verdict(projection_map(R3, ["x1", "x2"]), flat_metric(R3),
                                               LeviCivitaField(target), target, points, 1e-9)
            self.assertTrue(report.passed)

    def test_source_scaling_keeps_verdict(self):
        # g_M -> 9 g_M: Λ divide por 9, o resíduo normalizado por Λ não muda
        f = ExpressionMap(["x", "y"], ["x^2 - y^2", "x*y"])
        g = flat_metric(["x", "y"])
        scaled = g.conformal(math.log(3.0))
        lam, residual = hwc_residual(f, g, PLANE, [0.3, 0.4])
        scaled_lam, scaled_residual = hwc_residual(f, scaled, PLANE, [0.3, 0.4])
        self.assertAlmostEqual(scaled_lam, lam / 9.0, places=12)
        self.assertAlmostEqual(scaled_residual / scaled_lam, residual / lam, places=10)

        square = ExpressionMap(R3, ["x1^2", "x2"])
        for g_M in (HYPERBOLIC3, HYPERBOLIC3.conformal(math.log(3.0))):
            report = harmonic_morphism_verdict(ROTATIONAL, g_M, LeviCivitaField(PLANE), PLANE, HYPERBOLIC_SAMPLES, 1e-9)
            self.assertTrue(report.passed)
            report = harmonic_morphism_verdict(square, g_M, LeviCivitaField(PLANE), PLANE, HYPERBOLIC_SAMPLES, 1e-9)
            self.assertFalse(report.passed)


class TestHermitianStructures(unittest.TestCase):

    def test_standard_structure(self):
        f = ExpressionMap(R4, ["x1 + i*x2"], complex_valued=True)
        J = hermitian_from_submersion(f, flat_metric(R4), 1, [0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(J, STANDARD_J, atol=1e-12)
        reversed_J = hermitian_from_submersion(f, flat_metric(R4), -1, [0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(reversed_J[2:, 2:], -STANDARD_J[2:, 2:], atol=1e-12)
        self.assertEqual(orientation_count(f, flat_metric(R4), [0.1, 0.2, 0.3, 0.4]), 2)

    def test_holomorphic_map_has_one_integrable_orientation(self):
        f = ExpressionMap(R4, ["x1 + i*x2 + (x3 + i*x4)^2"], complex_valued=True)
        p = [0.2, -0.3, 0.5, 0.4]
        positive, negative = orientation_residuals(f, flat_metric(R4), p)
        self.assertLess(positive, 1e-8)
        self.assertGreater(negative, 1e-3)
        self.assertEqual(orientation_count(f, flat_metric(R4), p), 1)

    def test_structure_is_orthogonal_complex(self):
        f = ExpressionMap(R4, ["x1 + i*x2 + (x3 + i*x4)^2"], complex_valued=True)
        g = flat_metric(R4)
        J = HermitianStructureField(f, g).at([0.2, -0.3, 0.5, 0.4])
        np.testing.assert_allclose(J @ J, -np.eye(4), atol=1e-12)
        np.testing.assert_allclose(J.T @ J, np.eye(4), atol=1e-12)

    def test_rejected_submersions(self):
        g = flat_metric(R4)
        with self.assertRaises(NotSubmersive):
            hermitian_from_submersion(ExpressionMap(R4, ["x1", "2*x1"]), g, 1, [0.0, 0.0, 0.0, 0.0])
        with self.assertRaises(NotHorizontallyConformal):
            hermitian_from_submersion(ExpressionMap(R4, ["x1", "2*x2"]), g, 1, [0.0, 0.0, 0.0, 0.0])
        with self.assertRaises(DimensionError):
            hermitian_from_submersion(projection_map(R3, ["x1", "x2"]), flat_metric(R3), 1, [0.0, 0.0, 0.0])

    def test_nijenhuis_of_given_structures(self):
        self.assertEqual(nijenhuis_residual(ConstantComplexStructure(), [0, 0, 0, 0]), 0.0)
        with self.assertRaises(NotAlmostComplex):
            nijenhuis_residual(ConstantComplexStructure(np.eye(4)), [0, 0, 0, 0])

    def test_sampled_structure_matches_jets(self):
        # derivadas por diferenças centrais contra as derivadas exatas dos jets
        f = ExpressionMap(R4, ["x1 + i*x2 + (x3 + i*x4)^2"], complex_valued=True)
        g = flat_metric(R4)
        p = [0.2, -0.3, 0.5, 0.4]
        exact = nijenhuis_residual(HermitianStructureField(f, g, -1), p)
        sampled = nijenhuis_residual(SampledComplexStructure(lambda q: hermitian_from_submersion(f, g, -1, q)), p)
        self.assertAlmostEqual(sampled, exact, delta=1e-6 * max(1.0, exact))


if __name__ == "__main__":
    unittest.main()
