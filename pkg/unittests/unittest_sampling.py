import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import unittest
import numpy as np
from src.errors import DimensionError
from src.sampling import Box, derive_seed, halton_points


class TestBox(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(DimensionError):
            Box((0.0, 0.0), (1.0,))
        with self.assertRaises(ValueError):
            Box((1.0,), (0.0,))

    def test_contains_and_center(self):
        box = Box((0, -1), (2, 1))
        self.assertEqual(box.dim, 2)
        self.assertTrue(box.contains([2.0, 0.0]))
        self.assertFalse(box.contains([2.1, 0.0]))
        np.testing.assert_array_equal(box.center(), [1.0, 0.0])


class TestHalton(unittest.TestCase):

    def test_points_stay_in_the_box(self):
        box = Box((-1.0, 0.5, 3.0), (1.0, 2.0, 4.0))
        points = halton_points(box, 64, seed=5)
        self.assertEqual(points.shape, (64, 3))
        self.assertTrue(all(box.contains(p) for p in points))

    def test_reproducible_per_seed(self):
        box = Box((0.0, 0.0), (1.0, 1.0))
        np.testing.assert_array_equal(halton_points(box, 16, 3), halton_points(box, 16, 3))
        self.assertFalse(np.array_equal(halton_points(box, 16, 3), halton_points(box, 16, 4)))

    def test_pinned_coordinate(self):
        # lado de largura zero fixa a coordenada
        points = halton_points(Box((-1.0, 0.0), (1.0, 0.0)), 10, 0)
        np.testing.assert_array_equal(points[:, 1], np.zeros(10))
        self.assertGreater(np.ptp(points[:, 0]), 0.5)

    def test_empty_request(self):
        self.assertEqual(halton_points(Box((0.0,), (1.0,)), 0, 0).shape, (0, 1))

    def test_derived_seeds(self):
        self.assertEqual(derive_seed(7, "a.check"), derive_seed(7, "a.check"))
        self.assertNotEqual(derive_seed(7, "a.check"), derive_seed(8, "a.check"))
        self.assertNotEqual(derive_seed(7, "a.check"), derive_seed(7, "b.check"))
        self.assertGreaterEqual(derive_seed(0, "x"), 0)


if __name__ == "__main__":
    unittest.main()
