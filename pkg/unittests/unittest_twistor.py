import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import math
import unittest
import numpy as np
from src.algebra import pair_left_divide
from src.errors import (ContactViolation, IncidenceAtInfinity, NotHorizontallyConformal, OutOfDomain,
                        SingularJacobian)
from src.geometry import flat_metric, frobenius_residual
from src.maps import ExpressionMap
from src.sampling import Box
from src.twistor import (SurfacePatch, cauchy_riemann_residual, closed_form_rotational, conjugate_surface,
                         contact_pairing, contact_residual, horizontal_isotropic_directions, incidence_jets,
                         incidence_point, invert_incidence, isotropic_distribution, isotropy_residual, rotational_map,
                         seeds_from_table, sky, sky_tangent_pairing, submersion_from_surface)

INF = math.inf
EVERYWHERE = Box((-INF,) * 4, (INF,) * 4)
MODEL = SurfacePatch.from_strings(["1", "v", "u", "u*v"],
                                  Box((-20.0, 0.02, -20.0, -20.0), (20.0, 20.0, 20.0, 20.0)), "model")
SEED_TABLE = [{"u": "i", "v": v} for v in ("0", "1", "-1", "i", "-i", "3", "-3", "3*i", "-3*i")]


class TestContactForm(unittest.TestCase):

    def test_pairing(self):
        self.assertEqual(contact_pairing([1, 0, 0, 0], [0, 0, 1, 0]), 1)
        self.assertEqual(contact_pairing([1, 0, 0, 0], [0, 1, 0, 0]), 0)
        # antissimetria: theta(z, z) = 0
        rng = np.random.default_rng(5)
        for _ in range(20):
            z = rng.normal(size=4) + 1j * rng.normal(size=4)
            self.assertAlmostEqual(abs(contact_pairing(z, z)), 0.0, places=12)


class TestSurfacePatch(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(ValueError):
            SurfacePatch.from_strings(["1", "u", "v"])
        with self.assertRaises(ValueError):
            SurfacePatch.from_strings(["1", "u", "v", "w"])

    def test_contact_and_cauchy_riemann(self):
        for params in ([0.3, 0.8, 0.5, -0.2], [-1.0, 2.0, 3.0, 1.5]):
            self.assertEqual(contact_residual(MODEL, params), 0)
            self.assertEqual(cauchy_riemann_residual(MODEL, params), 0.0)

    def test_contact_violation(self):
        violating = SurfacePatch.from_strings(["1", "u", "v", "0"], name="violating")
        self.assertAlmostEqual(abs(contact_residual(violating, (0.2 + 0.1j, -0.3j))), 1.0)
        with self.assertRaises(ContactViolation):
            submersion_from_surface(violating, seeds_from_table(violating, [{"u": "0", "v": "0"}], EVERYWHERE))

    def test_non_holomorphic_patch(self):
        patch = SurfacePatch.from_strings(["1", "conj(v)", "u", "u*conj(v)"])
        self.assertGreater(cauchy_riemann_residual(patch, [0.3, 0.8, 0.5, -0.2]), 0.5)

    def test_conjugate_surface(self):
        conj = conjugate_surface(MODEL)
        self.assertEqual(conj.domain.lower[1], -20.0)
        self.assertEqual(conj.domain.upper[1], -0.02)
        u, v = 0.3 + 0.8j, 0.5 - 0.2j
        np.testing.assert_allclose(incidence_point(conj, (u.conjugate(), v.conjugate())),
                                   incidence_point(MODEL, (u, v)), atol=1e-12)
        self.assertAlmostEqual(abs(contact_residual(conj, (u.conjugate(), v.conjugate()))), 0.0, places=12)


class TestIncidence(unittest.TestCase):

    def test_model_incidence_is_rotational(self):
        for u, v in ((1j, 0), (0.3 + 0.8j, 0.5 - 0.2j), (-1.0 + 2.0j, 3.0 + 1.5j)):
            x = incidence_point(MODEL, (u, v))
            self.assertAlmostEqual(closed_form_rotational(x), u, places=12)

    def test_jets_match_finite_differences(self):
        params = np.array([0.3, 0.8, 0.5, -0.2])
        _, jac, _ = incidence_jets(MODEL, params)
        h = 1e-6
        for k in range(4):
            e = np.zeros(4)
            e[k] = h
            column = (incidence_point(MODEL, params + e) - incidence_point(MODEL, params - e)) / (2 * h)
            np.testing.assert_allclose(jac[:, k], column, atol=1e-8)

    def test_point_at_infinity(self):
        surface = SurfacePatch.from_strings(["u", "0", "1", "v"])
        with self.assertRaises(IncidenceAtInfinity):
            incidence_point(surface, (0, 0.5))

    def test_newton_roundtrip(self):
        target = np.array([0.3, 0.8, 0.5, -0.2])
        x = incidence_point(MODEL, target)
        solved = invert_incidence(MODEL, x, target + 0.05)
        np.testing.assert_allclose(solved, target, atol=1e-9)
        np.testing.assert_allclose(incidence_point(MODEL, solved), x, atol=1e-10)

    def test_newton_failures(self):
        # u real: x não depende de v
        with self.assertRaises(SingularJacobian):
            invert_incidence(MODEL, [0.5, 0.0, 0.0, 0.0], (0.5, 0.0, 0.1, 0.1))
        # ramo u_im < 0 fica fora da caixa de parâmetros
        other_branch = np.array([0.3, -0.8, 0.5, -0.2])
        with self.assertRaises(OutOfDomain):
            invert_incidence(MODEL, incidence_point(MODEL, other_branch), other_branch)


class TestSubmersion(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.phi = submersion_from_surface(MODEL, seeds_from_table(MODEL, SEED_TABLE, EVERYWHERE))

    def test_matches_closed_form(self):
        for x in ([0.2, 0.3, -0.1, 0.5], [-0.7, -0.4, 0.6, 0.2], [0.5, 0.1, 0.1, -0.9]):
            value = self.phi(x)
            expected = closed_form_rotational(x)
            self.assertAlmostEqual(complex(value[0], value[1]), expected, places=9)

    def test_jets_match_closed_form(self):
        x = [0.2, 0.3, -0.1, 0.5]
        _, jac, hess = self.phi.jets(x)
        _, jac_closed, hess_closed = rotational_map().jets(x)
        np.testing.assert_allclose(jac, jac_closed, atol=1e-8)
        np.testing.assert_allclose(hess, hess_closed, atol=1e-6)

    def test_boundary(self):
        boundary = self.phi.boundary()
        self.assertEqual(boundary.coords, ("x_A", "x_B", "x_C"))
        value = boundary([0.2, 0.3, -0.1])
        np.testing.assert_allclose(value, [0.2, math.sqrt(0.1)], atol=1e-9)

    def test_seeds(self):
        seeds = seeds_from_table(MODEL, [{"params": [0.0, 1.0, 0.0, 0.0], "region": {"min": [0, 0, 0, 0],
                                                                                     "max": [1, 1, 1, 1]}}],
                                 EVERYWHERE)
        self.assertEqual(seeds[0].guess, (0.0, 1.0, 0.0, 0.0))
        np.testing.assert_allclose(seeds[0].anchor, [0.0, 1.0, 0.0, 0.0], atol=1e-15)
        self.assertEqual(seeds[0].region.upper, (1.0, 1.0, 1.0, 1.0))


class TestSkies(unittest.TestCase):

    def test_sky_contains_incidence(self):
        x = [0.3, -0.5, 0.7, 0.2]
        z = sky(x, (1.0, 0.5j)).z
        alpha, beta = pair_left_divide((z[0], z[1]), (z[2], z[3]))
        np.testing.assert_allclose([alpha.real, alpha.imag, beta.real, beta.imag], x, atol=1e-12)
        with self.assertRaises(ValueError):
            sky(x, (0, 0))

    def test_skies_are_legendrian_only_on_the_slice(self):
        # θ(∂_σ) = −2iτ x_D
        self.assertLess(sky_tangent_pairing([0.3, -0.5, 0.7, 0.0], (1.0, 1.0)), 1e-14)
        self.assertAlmostEqual(sky_tangent_pairing([0.3, -0.5, 0.7, 0.4], (1.0, 1.0)), 0.8, places=12)


class TestIsotropicDirections(unittest.TestCase):

    def test_isotropic_and_integrable(self):
        f = rotational_map(("x_A", "x_B", "x_C"))
        g = flat_metric(("x_A", "x_B", "x_C"))
        p = [0.2, 0.3, -0.4]
        for d in horizontal_isotropic_directions(f, g, p):
            self.assertLess(isotropy_residual(d, g, p), 1e-14)
            self.assertAlmostEqual(float(np.linalg.norm(d.real)), 1.0)
        for sign in (1, -1):
            self.assertLess(frobenius_residual(isotropic_distribution(f, g, sign), p), 1e-9)

    def test_requires_conformality(self):
        f = ExpressionMap(("x", "y", "z"), ["x", "2*y"])
        with self.assertRaises(NotHorizontallyConformal):
            horizontal_isotropic_directions(f, flat_metric(("x", "y", "z")), [0.0, 0.0, 0.0])


if __name__ == "__main__":
    unittest.main()
