import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import unittest
from unittest.mock import MagicMock
import numpy as np
from src.errors import ConfigError
from src.library import (Library, as_list, as_number, check_keys, decode_metric, decode_seed_table,
                         decode_surface, decode_weyl, parse_box, parse_coords, parse_expression,
                         parse_orientation)


class TestNodeHelpers(unittest.TestCase):

    def test_check_keys(self):
        with self.assertRaisesRegex(ConfigError, r"^a\.extra: unknown key$"):
            check_keys({"x": 1, "extra": 2}, "a", ("x",))
        with self.assertRaisesRegex(ConfigError, r"^a\.x: required key missing$"):
            check_keys({}, "a", (), ("x",))
        with self.assertRaises(ConfigError):
            check_keys([1, 2], "a", ())

    def test_scalars_and_lists(self):
        self.assertEqual(as_number("1e-3", "t"), 1e-3)
        self.assertEqual(as_number(2, "t"), 2.0)
        with self.assertRaises(ConfigError):
            as_number("muito", "t")
        with self.assertRaises(ConfigError):
            as_number(True, "t")
        with self.assertRaisesRegex(ConfigError, "expected 3 entries"):
            as_list([1, 2], "l", 3)

    def test_expression_errors_name_the_path(self):
        self.assertEqual(parse_expression("x + 1", "e").evaluate({"x": 1.0}), 2.0)
        with self.assertRaisesRegex(ConfigError, r"^metric\.g\.diagonal\[0\]: .* at byte 4"):
            parse_expression("1 + * 2", "metric.g.diagonal[0]")

    def test_box_coords_orientation(self):
        box = parse_box({"min": [0, 0], "max": [1, 2]}, "d", 2)
        self.assertEqual(box.upper, (1.0, 2.0))
        with self.assertRaises(ConfigError):
            parse_box({"min": [1], "max": [0]}, "d")
        with self.assertRaises(ConfigError):
            parse_box({"min": [0, 0], "max": [1, 1]}, "d", 3)
        self.assertEqual(parse_coords(["a", "b"], "c"), ("a", "b"))
        with self.assertRaisesRegex(ConfigError, "repeated"):
            parse_coords(["a", "a"], "c")
        with self.assertRaises(ConfigError):
            parse_coords(["a"], "c")
        self.assertEqual(parse_orientation(-1, "o"), -1)
        with self.assertRaises(ConfigError):
            parse_orientation(2, "o")


class TestDecoders(unittest.TestCase):

    def test_metric_from_diagonal(self):
        g = decode_metric({"coords": ["x", "y"], "diagonal": ["1", "x^2"]}, "metric.polar", "polar")
        np.testing.assert_allclose(g.at([1.0, 2.0]), np.diag([1.0, 1.0]))

    def test_metric_needs_one_source(self):
        with self.assertRaisesRegex(ConfigError, "exactly one"):
            decode_metric({"coords": ["x", "y"]}, "m", "m")
        with self.assertRaisesRegex(ConfigError, "exactly one"):
            decode_metric({"coords": ["x", "y"], "diagonal": ["1", "1"],
                           "components": [["1", "0"], ["0", "1"]]}, "m", "m")

    def test_asymmetric_components(self):
        with self.assertRaises(ConfigError):
            decode_metric({"coords": ["x", "y"], "components": [["1", "x"], ["0", "1"]]}, "m", "m")
        with self.assertRaises(ConfigError):
            decode_weyl({"coords": ["x1", "x2", "x3"],
                         "metric": {"components": [["1", "x1", "0"], ["0", "1", "0"], ["0", "0", "1"]]}},
                        "weyl.w", "w")

    def test_weyl_defaults(self):
        W = decode_weyl({"coords": ["x1", "x2", "x3"], "metric": {"diagonal": ["1", "1", "1"]}}, "weyl.w", "w")
        self.assertIsNone(W.domain)
        self.assertIsNone(W.scalar)
        self.assertTrue(W.is_metric())
        with self.assertRaises(ConfigError):
            decode_weyl({"coords": ["x1", "x2"], "metric": {"diagonal": ["1", "1"]}}, "weyl.w", "w")

    def test_seed_table(self):
        rows = decode_seed_table([{"u": "i", "v": "0"}, {"params": [0, 1, 0, 0]}], "s")
        self.assertEqual(len(rows), 2)
        with self.assertRaisesRegex(ConfigError, r"^s\[0\]: a seed needs"):
            decode_seed_table([{"u": "i"}], "s")
        with self.assertRaises(ConfigError):
            decode_seed_table([{"params": [0, 1]}], "s")

    def test_surface(self):
        S, table = decode_surface({"z": ["1", "v", "u", "u*v"], "seeds": [{"u": "i", "v": "1"}]}, "surface.m", "m")
        self.assertEqual(len(S.z), 4)
        self.assertEqual(len(table), 1)
        with self.assertRaises(ConfigError):
            decode_surface({"z": ["1", "v", "u"]}, "surface.m", "m")


class TestLibrary(unittest.TestCase):

    def setUp(self):
        self.library = Library()

    def test_names(self):
        self.assertIn("model-rotational", self.library.names("surfaces"))
        self.assertEqual(self.library.names("weyl"), ["flat-euclidean", "hyperbolic-3", "round-s3"])
        self.assertEqual(self.library.names("metrics"), ["flat-2", "flat-3", "flat-4"])

    def test_builtin_objects(self):
        self.assertEqual(self.library.weyl("round-s3").scalar.evaluate({}), 6.0)
        S, table = self.library.surface("model-rotational")
        self.assertEqual(len(table), 9)
        self.assertEqual(self.library.metric("flat-4").coords, ("x_A", "x_B", "x_C", "x_D"))

    def test_metric_rename(self):
        self.assertEqual(self.library.metric("flat-3", ["a", "b", "c"]).coords, ("a", "b", "c"))
        with self.assertRaisesRegex(ConfigError, "has 3 coordinates"):
            self.library.metric("flat-3", ["a", "b"])

    def test_unknown_builtin(self):
        with self.assertRaisesRegex(ConfigError, "Unknown builtin 'flat-9'"):
            self.library.metric("flat-9")

    def test_missing_library_document(self):
        config = MagicMock()
        config.get.side_effect = KeyError("library")
        with self.assertRaises(ConfigError):
            Library(config)


if __name__ == "__main__":
    unittest.main()
