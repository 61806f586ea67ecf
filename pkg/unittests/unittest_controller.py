import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import unittest
from unittest.mock import MagicMock, patch
from src.config_manager import ConfigManager
from src.controller import Controller, config_digest
from src.errors import ConfigError

FLAT_DOCUMENT = {
    "name": "teste",
    "metric": {"euclid": {"builtin": "flat-4"}},
    "check": [
        {"name": "teste.flat", "kind": "scalar_curvature", "metric": "euclid", "expected": 0,
         "domain": {"min": [-1, -1, -1, -1], "max": [1, 1, 1, 1]}},
        {"name": "teste.quaternions", "kind": "quaternion_laws", "tolerance": 1.0e-12},
    ],
}


def document(*checks, **sections):
    doc = {"name": "teste", **sections}
    doc["check"] = list(checks)
    return doc


class TestControllerParsing(unittest.TestCase):

    def setUp(self):
        self.config = ConfigManager()
        self.controller = Controller(self.config, MagicMock())

    def test_every_builtin_suite_parses(self):
        for name in self.config.suite_names():
            suite = self.controller.parse(self.config.get_suite(name))
            self.assertTrue(suite.checks, name)

    def test_unknown_section(self):
        with self.assertRaisesRegex(ConfigError, "^metrics: unknown top-level section"):
            self.controller.parse({"metrics": {}})

    def test_unknown_kind_and_missing_fields(self):
        with self.assertRaisesRegex(ConfigError, r"^check\[0\]\.kind: unknown check kind"):
            self.controller.parse(document({"name": "a", "kind": "torsion"}))
        with self.assertRaisesRegex(ConfigError, r"^check\[0\]\.expected: required key missing"):
            self.controller.parse(document({"name": "a", "kind": "scalar_curvature", "metric": "m"},
                                           metric={"m": {"builtin": "flat-4"}}))

    def test_unknown_reference(self):
        with self.assertRaisesRegex(ConfigError, r"^check\[0\]\.metric: unknown metric 'nada'"):
            self.controller.parse(document({"name": "a", "kind": "einstein", "metric": "nada"}))

    def test_duplicate_names(self):
        check = {"name": "a", "kind": "quaternion_laws"}
        with self.assertRaisesRegex(ConfigError, "duplicate check name 'a'"):
            self.controller.parse(document(check, dict(check)))

    def test_domain_is_required_for_metrics(self):
        with self.assertRaisesRegex(ConfigError, r"check\[0\]\.domain: required"):
            self.controller.parse(document({"name": "a", "kind": "einstein", "metric": "m"},
                                           metric={"m": {"builtin": "flat-4"}}))

    def test_domain_dimension(self):
        with self.assertRaises(ConfigError):
            self.controller.parse(document({"name": "a", "kind": "einstein", "metric": "m",
                                            "domain": {"min": [0, 0], "max": [1, 1]}},
                                           metric={"m": {"builtin": "flat-4"}}))

    def test_composition_cycle(self):
        doc = document(weyl={"flat": {"builtin": "flat-euclidean"}}, hspace={"h": {"weyl": "flat"}},
                       map={"a": {"compose": "b", "hspace": "h"}, "b": {"compose": "a", "hspace": "h"}})
        with self.assertRaisesRegex(ConfigError, "composition cycle"):
            self.controller.parse(doc)

    def test_include_cycle(self):
        with patch.object(self.config, "get_suite", return_value={"include": ["laco"]}):
            with self.assertRaisesRegex(ConfigError, "includes itself"):
                self.controller.parse({"include": ["laco"]})

    def test_include_merges_checks(self):
        suite = self.controller.parse({"name": "junto", "include": ["contact-violation", "hspace-flat"]})
        names = [c.name for c in suite.checks]
        self.assertIn("contact-violation.contact", names)
        self.assertIn("hspace-flat.pole-order", names)

    def test_categories(self):
        suite = self.controller.parse(self.config.get_suite("hspace-flat"))
        categories = {c.name: self.controller.category(suite, c) for c in suite.checks}
        self.assertEqual(set(categories.values()), {"calderbank"})
        suite = self.controller.parse(FLAT_DOCUMENT)
        self.assertEqual({self.controller.category(suite, c) for c in suite.checks}, {"metric"})


class TestControllerRunning(unittest.TestCase):

    def setUp(self):
        self.controller = Controller(ConfigManager(), MagicMock())

    def test_tolerance_precedence(self):
        suite = self.controller.parse(FLAT_DOCUMENT)
        flat, quaternions = suite.checks
        self.assertEqual(self.controller.tolerance(flat, None), 1.0e-6)
        self.assertEqual(self.controller.tolerance(quaternions, None), 1.0e-12)
        self.assertEqual(self.controller.tolerance(quaternions, {"*": 1e-3}), 1e-3)
        self.assertEqual(self.controller.tolerance(quaternions, {"*": 1e-3, "teste.quaternions": 1e-2}), 1e-2)

    def test_flat_suite_passes(self):
        report = self.controller.run_suite(FLAT_DOCUMENT, seed=1, samples=5)
        self.assertTrue(report.passed)
        self.assertEqual([c.name for c in report.checks], ["teste.flat", "teste.quaternions"])
        self.assertEqual(report.get("teste.flat").sample_count, 5)
        self.assertEqual(report.metadata["seed"], 1)
        self.assertEqual(report.metadata["config_digest"], config_digest(FLAT_DOCUMENT))

    def test_runs_are_reproducible(self):
        first = self.controller.run_suite(FLAT_DOCUMENT, seed=4, samples=4).to_json()
        self.assertEqual(first, self.controller.run_suite(FLAT_DOCUMENT, seed=4, samples=4).to_json())

    def test_category_filter(self):
        report = self.controller.run_suite(FLAT_DOCUMENT, samples=3, category="surface")
        self.assertEqual(report.checks, [])
        self.assertEqual(report.exit_code(), 0)

    def test_contact_violation_fails(self):
        doc = ConfigManager().get_suite("contact-violation")
        check = self.controller.run_suite(doc, samples=4).get("contact-violation.contact")
        self.assertFalse(check.passed)
        self.assertAlmostEqual(check.max_residual, 1.0)

    def test_rotational_map_is_not_harmonic_on_flat_space(self):
        # tensão 1/rho: o mapa não passa como morfismo harmônico em R^3 plano
        doc = document(
            {"name": "teste.rotational", "kind": "harmonic_morphism", "map": "rot", "metric": "m",
             "domain": {"min": [-1, -1, 0.5], "max": [1, 1, 1]}},
            metric={"m": {"builtin": "flat-3"}},
            map={"rot": {"coords": ["x1", "x2", "x3"], "components": ["x1 + i*sqrt(x2^2 + x3^2)"],
                         "complex": True}})
        check = self.controller.run_suite(doc, samples=4).get("teste.rotational")
        self.assertFalse(check.passed)
        self.assertGreater(check.max_residual, 0.1)

    def test_overflow_is_a_sample_error(self):
        # exp(1000*x1) estoura para x1 > 0.71: erro por amostra, não exceção
        doc = document(
            {"name": "teste.overflow", "kind": "harmonic_morphism", "map": "big", "metric": "m",
             "domain": {"min": [0.8, 0, 0], "max": [1, 1, 1]}},
            metric={"m": {"builtin": "flat-3"}},
            map={"big": {"coords": ["x1", "x2", "x3"], "components": ["exp(1000*x1) + i*x2"], "complex": True}})
        check = self.controller.run_suite(doc, samples=4).get("teste.overflow")
        self.assertFalse(check.passed)
        self.assertEqual(len(check.errors), 4)
        self.assertEqual({e["kind"] for e in check.errors}, {"DomainError"})

    def test_failed_construction_is_reported_per_check(self):
        doc = document(
            {"name": "teste.closed-form", "kind": "closed_form", "map": "phi",
             "domain": {"min": [0, 0, 0, 0.5], "max": [1, 1, 1, 1]}},
            surface={"violating": {"builtin": "contact-violating"}},
            map={"phi": {"surface": "violating"}})
        check = self.controller.run_suite(doc, samples=4).get("teste.closed-form")
        self.assertFalse(check.passed)
        self.assertEqual(check.errors[0]["kind"], "ContactViolation")
        self.assertEqual(check.sample_count, 0)

    def test_pole_order_on_flat_base(self):
        doc = ConfigManager().get_suite("hspace-flat")
        report = self.controller.run_suite(doc, samples=3, category="calderbank")
        self.assertTrue(report.get("hspace-flat.pole-order").passed)


if __name__ == "__main__":
    unittest.main()
