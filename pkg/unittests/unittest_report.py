import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import json
import math
import tempfile
import unittest
from unittest.mock import patch
import numpy as np
from src.errors import DomainError, ReportWriteError
from src.report import Check, CheckReport, canonical_json, emit, sample_error


class TestCheck(unittest.TestCase):

    def test_from_samples(self):
        check = Check.from_samples("a", 1e-6, [[0.0], [1.0], [2.0]], [1e-9, 5e-7, 1e-8])
        self.assertTrue(check.passed)
        self.assertEqual(check.max_residual, 5e-7)
        self.assertEqual(check.worst_point, [1.0])
        self.assertEqual(check.sample_count, 3)

    def test_tolerance_is_inclusive(self):
        self.assertTrue(Check.from_samples("a", 1e-6, [[0.0]], [1e-6]).passed)
        self.assertFalse(Check.from_samples("a", 1e-6, [[0.0]], [1.1e-6]).passed)

    def test_errors_fail_the_check(self):
        error = sample_error([0.5, 1.0], DomainError("fora"))
        self.assertEqual(error, {"point": [0.5, 1.0], "kind": "DomainError"})
        check = Check.from_samples("a", 1.0, [[0.0, 0.0], [0.5, 1.0]], [0.0, None], [error])
        self.assertFalse(check.passed)
        self.assertEqual(check.max_residual, 0.0)

    def test_nan_counts_as_failure(self):
        check = Check.from_samples("a", 1.0, [[0.0]], [float("nan")])
        self.assertFalse(check.passed)
        self.assertEqual(check.max_residual, math.inf)

    def test_failed(self):
        check = Check.failed("b", 1e-6, "ConfigError", "sem mapa")
        self.assertFalse(check.passed)
        self.assertEqual(check.extras, {"message": "sem mapa"})
        self.assertEqual(check.errors[0]["kind"], "ConfigError")


class TestCheckReport(unittest.TestCase):

    def setUp(self):
        self.report = CheckReport([
            Check.from_samples("z.last", 1e-6, [[0.0]], [0.0]),
            Check.from_samples("a.first", 1e-6, [[1.0]], [1.0]),
        ], {"seed": 3, "suite": "teste"})

    def test_passed_and_exit_code(self):
        self.assertFalse(self.report.passed)
        self.assertEqual(self.report.exit_code(), 1)
        self.assertEqual(CheckReport().exit_code(), 0)

    def test_sorted_and_get(self):
        self.assertEqual([c.name for c in self.report.sorted().checks], ["a.first", "z.last"])
        self.assertEqual(self.report.get("z.last").max_residual, 0.0)
        with self.assertRaises(KeyError):
            self.report.get("nada")

    def test_json_roundtrip(self):
        text = self.report.to_json()
        self.assertEqual(CheckReport.from_json(text).to_json(), text)
        data = json.loads(text)
        self.assertEqual([c["name"] for c in data["checks"]], ["a.first", "z.last"])
        self.assertIs(data["checks"][0]["pass"], False)


class TestCanonicalJson(unittest.TestCase):

    def test_format(self):
        text = canonical_json({"b": [1, 2.5, np.float64(0.1)], "a": {"flag": True, "none": None}})
        self.assertEqual(text, '{\n  "a": {\n    "flag": true,\n    "none": null\n  },\n'
                               '  "b": [1, 2.5, 0.10000000000000001]\n}\n')

    def test_special_floats(self):
        self.assertEqual(canonical_json([math.inf, -math.inf, 3.0]), "[Infinity, -Infinity, 3.0]\n")

    def test_unserializable(self):
        with self.assertRaises(TypeError):
            canonical_json({"x": object()})


class TestEmit(unittest.TestCase):

    def test_writes_file(self):
        report = CheckReport([Check.from_samples("a", 1.0, [[0.0]], [0.0])])
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "sub", "report.json")
            emit(report, path)
            with open(path, encoding="utf-8") as file:
                self.assertEqual(file.read(), report.to_json())

    @patch('builtins.open', side_effect=PermissionError("somente leitura"))
    def test_write_error(self, _):
        with tempfile.TemporaryDirectory() as folder:
            with self.assertRaises(ReportWriteError):
                emit(CheckReport(), os.path.join(folder, "report.json"))


if __name__ == "__main__":
    unittest.main()
