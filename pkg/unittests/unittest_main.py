import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import json
import tempfile
import unittest
from unittest.mock import MagicMock, patch
from main.main import REPORT_DIR_ENV, build_parser, main, parse_tolerances, report_path
from src.errors import ConfigError


class TestArguments(unittest.TestCase):

    def test_parse_tolerances(self):
        self.assertEqual(parse_tolerances(None), {})
        self.assertEqual(parse_tolerances(["1e-5", "a.check=1e-3"]), {"*": 1e-5, "a.check": 1e-3})
        with self.assertRaises(ConfigError):
            parse_tolerances(["a.check=muito"])

    def test_parser_defaults(self):
        args = build_parser().parse_args(["calderbank"])
        self.assertEqual((args.seed, args.samples, args.suite, args.config), (0, None, None, None))

    def test_config_and_suite_are_exclusive(self):
        with patch("sys.stderr"), self.assertRaises(SystemExit):
            build_parser().parse_args(["run", "--config", "a.yaml", "--suite", "full"])

    def test_report_path(self):
        config = MagicMock()
        config.setting.return_value = "reports"
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(report_path(None, "full", 3, config), os.path.join("reports", "full-3.json"))
            self.assertEqual(report_path("out/r.json", "full", 3, config), "out/r.json")
        with patch.dict(os.environ, {REPORT_DIR_ENV: "/tmp/relatorios"}):
            self.assertEqual(report_path("r.json", "full", 3, config), os.path.join("/tmp/relatorios", "r.json"))


class TestMain(unittest.TestCase):

    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        # silencia o logger durante os testes
        self.patcher = patch("main.main.Logger")
        self.patcher.start()

    def tearDown(self):
        self.patcher.stop()
        self.folder.cleanup()

    def test_unknown_suite(self):
        self.assertEqual(main(["run", "--suite", "nada"]), 2)

    def test_bad_samples(self):
        self.assertEqual(main(["run", "--suite", "contact-violation", "--samples", "0"]), 2)

    def test_failing_suite_writes_report(self):
        path = os.path.join(self.folder.name, "violation.json")
        self.assertEqual(main(["surface-pipeline", "--suite", "contact-violation", "--samples", "3",
                               "--report", path]), 1)
        with open(path, encoding="utf-8") as file:
            report = json.load(file)
        self.assertEqual(report["metadata"]["suite"], "contact-violation")
        self.assertFalse(report["checks"][0]["pass"])

    def test_passing_document(self):
        suite = os.path.join(self.folder.name, "quaternions.yaml")
        with open(suite, "w", encoding="utf-8") as file:
            file.write("name: quaternions\ncheck:\n  - name: q\n    kind: quaternion_laws\n")
        with patch.dict(os.environ, {REPORT_DIR_ENV: self.folder.name}):
            self.assertEqual(main(["verify-metric", "--config", suite, "--samples", "5", "--seed", "2"]), 0)
        self.assertTrue(os.path.exists(os.path.join(self.folder.name, "quaternions-2.json")))

    def test_overflowing_map_fails_without_crashing(self):
        suite = os.path.join(self.folder.name, "overflow.yaml")
        with open(suite, "w", encoding="utf-8") as file:
            file.write("name: overflow\n"
                       "metric:\n  m: {builtin: flat-3}\n"
                       "map:\n  big: {coords: [x1, x2, x3], components: [\"exp(1000*x1) + i*x2\"], complex: true}\n"
                       "check:\n  - name: overflow.hm\n    kind: harmonic_morphism\n    map: big\n    metric: m\n"
                       "    domain: {min: [0.8, 0, 0], max: [1, 1, 1]}\n")
        path = os.path.join(self.folder.name, "overflow.json")
        self.assertEqual(main(["run", "--config", suite, "--samples", "3", "--report", path]), 1)
        with open(path, encoding="utf-8") as file:
            report = json.load(file)
        self.assertEqual(report["checks"][0]["errors"][0]["kind"], "DomainError")

    def test_invalid_document(self):
        suite = os.path.join(self.folder.name, "broken.yaml")
        with open(suite, "w", encoding="utf-8") as file:
            file.write("check:\n  - name: q\n    kind: torsion\n")
        self.assertEqual(main(["run", "--config", suite]), 2)


if __name__ == "__main__":
    unittest.main()
