import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import unittest
import numpy as np
from src.algebra import (I, J, K, ONE, ProjectivePoint, Quaternion, embed_complex_pair, pair_left_divide,
                         pair_mul, pair_norm2, quat_inv, quat_mul)
from src.errors import NearZeroQuaternion


class TestQuaternion(unittest.TestCase):

    def test_hamilton_rules(self):
        # i² = j² = k² = ijk = −1
        for unit in (I, J, K):
            self.assertTrue(quat_mul(unit, unit).is_close(-ONE))
        self.assertTrue(quat_mul(quat_mul(I, J), K).is_close(-ONE))
        self.assertTrue(quat_mul(I, J).is_close(K))
        self.assertTrue(quat_mul(J, I).is_close(-K))

    def test_associative_and_norm_multiplicative(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            p, q, r = (Quaternion(*rng.normal(size=4)) for _ in range(3))
            self.assertTrue(quat_mul(quat_mul(p, q), r).is_close(quat_mul(p, quat_mul(q, r)), 1e-12))
            self.assertAlmostEqual(quat_mul(p, q).norm(), p.norm() * q.norm(), places=12)

    def test_inverse(self):
        q = Quaternion(1.0, -2.0, 0.5, 3.0)
        self.assertTrue(quat_mul(q, quat_inv(q)).is_close(ONE))
        self.assertTrue(quat_mul(q.inverse(), q).is_close(ONE))

    def test_inverse_of_zero(self):
        with self.assertRaises(NearZeroQuaternion):
            quat_inv(Quaternion(0.0))
        with self.assertRaises(NearZeroQuaternion):
            Quaternion(1e-16, 0.0, 0.0, 0.0).inverse()

    def test_embedding(self):
        # z1 + z2·j com z1 = 1 + 2i e z2 = 3 + 4i
        q = embed_complex_pair(1 + 2j, 3 + 4j)
        self.assertEqual(q.as_tuple(), (1.0, 2.0, 3.0, 4.0))
        self.assertEqual(q.to_pair(), (1 + 2j, 3 + 4j))
        self.assertTrue((embed_complex_pair(1 + 2j, 0) + quat_mul(embed_complex_pair(3 + 4j, 0), J)).is_close(q))

    def test_scalar_multiplication(self):
        q = Quaternion(1.0, 2.0, 3.0, 4.0)
        self.assertEqual((2 * q).as_tuple(), (2.0, 4.0, 6.0, 8.0))
        self.assertEqual((q * 0.5).as_tuple(), (0.5, 1.0, 1.5, 2.0))


class TestComplexPairs(unittest.TestCase):

    def test_pair_product_matches_hamilton(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            p, q = (Quaternion(*rng.normal(size=4)) for _ in range(2))
            product = Quaternion.from_pair(*pair_mul(p.to_pair(), q.to_pair()))
            self.assertTrue(product.is_close(quat_mul(p, q), 1e-12))

    def test_pair_norm_and_division(self):
        p = (1 + 1j, 2 - 1j)
        q = (0.5j, -3 + 0j)
        self.assertAlmostEqual(pair_norm2(p).real, 7.0)
        quotient = pair_left_divide(p, q)
        back = pair_mul(p, quotient)
        self.assertAlmostEqual(abs(back[0] - q[0]), 0.0, places=12)
        self.assertAlmostEqual(abs(back[1] - q[1]), 0.0, places=12)


class TestProjectivePoint(unittest.TestCase):

    def test_normalize_is_scale_invariant(self):
        z = ProjectivePoint((1 + 1j, 2.0, -0.5j, 0.25))
        w = z.scaled(3 - 4j)
        self.assertTrue(z.is_close(w))
        normalized = z.normalize()
        self.assertAlmostEqual(normalized.z[1], 1.0)

    def test_invalid_points(self):
        with self.assertRaises(ValueError):
            ProjectivePoint((0, 0, 0, 0))
        with self.assertRaises(ValueError):
            ProjectivePoint((1, 2, 3))

    def test_distinct_points(self):
        self.assertFalse(ProjectivePoint((1, 0, 0, 0)).is_close(ProjectivePoint((0, 1, 0, 0))))


if __name__ == "__main__":
    unittest.main()
