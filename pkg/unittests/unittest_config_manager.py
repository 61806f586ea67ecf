import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))


import tempfile
import unittest
from src.config_manager import ConfigManager
from src.errors import ConfigError

class TestConfigManager(unittest.TestCase):

    def setUp(self):
        self.config_manager = ConfigManager()

    def test_get_config(self):
        config = self.config_manager.get("conf")
        self.assertIn("debug_level", config)
        self.assertEqual(config["sampling"]["count"], 100)  # Adjust based on your config

    def test_get_missing_config(self):
        with self.assertRaises(KeyError):
            self.config_manager.get("inexistente")

    def test_setting(self):
        # Floats do YAML precisam do ponto decimal (1.0e-6) para não virarem strings
        self.assertEqual(self.config_manager.setting("newton", "max_iterations"), 50)
        self.assertIsInstance(self.config_manager.setting("tolerances", "default"), float)
        self.assertEqual(self.config_manager.setting("nao", "existe", default=7), 7)

    def test_reload_configs(self):
        self.config_manager.reload()
        config = self.config_manager.get("conf")
        self.assertIn("tolerances", config)
        self.assertIn("library", self.config_manager.configs)

    def test_suites(self):
        names = self.config_manager.suite_names()
        for name in ("metrics-basic", "weyl-basic", "surface-model", "hspace-flat", "full"):
            self.assertIn(name, names)
        suite = self.config_manager.get_suite("hspace-flat")
        self.assertIn("check", suite)
        with self.assertRaises(KeyError):
            self.config_manager.get_suite("nao-existe")

    def test_load_document(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "lista.yaml")
            with open(path, "w", encoding="utf-8") as file:
                file.write("- a\n- b\n")
            # Nível superior precisa ser um mapeamento
            with self.assertRaises(ConfigError):
                ConfigManager.load_document(path)

            with open(path, "w", encoding="utf-8") as file:
                file.write("check: [\n")
            with self.assertRaises(ConfigError):
                ConfigManager.load_document(path)

        with self.assertRaises(FileNotFoundError):
            ConfigManager.load_document(os.path.join("nao", "existe.yaml"))

    def test_invalid_config_file(self):
        with tempfile.TemporaryDirectory() as folder:
            with open(os.path.join(folder, "conf.yaml"), "w", encoding="utf-8") as file:
                file.write("debug_level: [\n")
            with self.assertRaises(ConfigError):
                ConfigManager(folder)

    def test_missing_directory(self):
        with self.assertRaises(FileNotFoundError):
            ConfigManager(os.path.join("nao", "existe"))

if __name__ == "__main__":
    unittest.main()
