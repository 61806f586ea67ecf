import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import unittest
from colorama import Fore
from src.logger import Logger
from src.errors import ConfigError
from src.report import Check
from unittest.mock import patch

GREEN, YELLOW, WHITE = Fore.GREEN, Fore.YELLOW, Fore.WHITE

class TestLogger(unittest.TestCase):

    def setUp(self):
        # Mock ConfigManager para controlar o nível inicial
        self.patcher = patch('src.config_manager.ConfigManager.get')
        self.mock_get = self.patcher.start()
        self.mock_get.return_value = {"debug_level": "INFO"}

        self.logger = Logger()

    def tearDown(self):
        self.patcher.stop()

    def test_initialization(self):
        self.assertEqual(self.logger.level, Logger.LEVELS["INFO"])
        self.assertTrue(self.logger.show_tag)

    def test_unknown_level_falls_back_to_info(self):
        self.mock_get.return_value = {"debug_level": "BARULHO"}
        self.assertEqual(Logger().level, Logger.LEVELS["INFO"])

    def test_set_level(self):
        self.logger.set_level("DEBUG")
        self.assertEqual(self.logger.level, Logger.LEVELS["DEBUG"])
        self.logger.set_level("ERROR")
        self.assertEqual(self.logger.level, Logger.LEVELS["ERROR"])
        self.assertFalse(self.logger.is_enabled("WARNING"))
        self.assertTrue(self.logger.is_enabled("FATAL"))

    def test_enable_disable_tags(self):
        self.logger.disable_tags()
        self.assertFalse(self.logger.show_tag)
        self.logger.enable_tags()
        self.assertTrue(self.logger.show_tag)

    @patch('builtins.print')
    def test_print(self, mock_print):
        self.logger.set_level("INFO")
        self.logger.print("Test Message", "INFO")
        mock_print.assert_called_with(f"{GREEN}[INF] Test Message", end=Fore.RESET)

        self.logger.disable_tags()
        self.logger.print("No Tag Message", "INFO")
        mock_print.assert_called_with(f"{GREEN}No Tag Message", end=Fore.RESET)

        self.logger.set_level("ERROR")
        self.logger.print("Should not print", "INFO")
        mock_print.assert_called_with(f"{GREEN}No Tag Message", end=Fore.RESET)  # Não muda, pois não deve chamar novamente

    @patch('builtins.print')
    def test_println(self, mock_print):
        self.logger.println("Line Message", "WARNING")
        mock_print.assert_called_with(f"{YELLOW}[WRN] Line Message\n", end=Fore.RESET)

    @patch('builtins.print')
    def test_print_separator(self, mock_print):
        self.logger.set_level("DEBUG")
        self.logger.print_separator(level="DEBUG", sep_type="=", size=10)
        mock_print.assert_called_with(f"{WHITE}[DBG] ==========\n", end=Fore.RESET)

        self.logger.disable_tags()
        self.logger.print_separator(level="INFO", sep_type="-", size=5)
        mock_print.assert_called_with(f"{GREEN}-----\n", end=Fore.RESET)

    def test_explicit_level(self):
        # nível explícito dispensa a configuração
        self.assertEqual(Logger(level="warning").level, Logger.LEVELS["WARNING"])

    @patch('builtins.print')
    def test_check_result(self, mock_print):
        self.logger.check_result(Check.from_samples("a.pass", 1e-6, [[0.0]], [2e-7]))
        mock_print.assert_called_with(
            f"{GREEN}[INF] PASS a.pass: max_residual 2.000e-07 (tol 1.0e-06, 1 samples, 0 errors)\n", end=Fore.RESET)
        self.logger.check_result(Check.failed("a.fail", 1e-6, "ContactViolation"))
        mock_print.assert_called_with(
            f"{YELLOW}[WRN] FAIL a.fail: max_residual inf (tol 1.0e-06, 0 samples, 1 errors)\n", end=Fore.RESET)

    @patch('builtins.print')
    def test_failure(self, mock_print):
        self.logger.failure("run", ConfigError("check[0].kind: unknown check kind 'x'"))
        mock_print.assert_called_with(
            f"{Fore.RED}[ERR] run: ConfigError: check[0].kind: unknown check kind 'x'\n", end=Fore.RESET)
        mock_print.reset_mock()
        self.logger.failure("amostra", ConfigError("x"), "DEBUG")
        mock_print.assert_not_called()

    def test_methods_are_documented(self):
        # cada método público tem docstring própria
        for name in ("__init__", "set_level", "enable_tags", "disable_tags", "is_enabled", "print", "println",
                     "print_separator", "check_result", "failure"):
            self.assertTrue(getattr(Logger, name).__doc__, name)


if __name__ == "__main__":
    unittest.main()
