import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.logger import Logger
from src.report import Check


def logger_demo():
    logger = Logger()

    logger.print_separator(sep_type="=")
    logger.println("HeavenMorph logger demo", "INFO")

    # Mesmo resultado de verificação em cada nível configurado
    checks = [Check.from_samples("demo.pass", 1e-6, [[0.0]], [3e-9]),
              Check.from_samples("demo.fail", 1e-6, [[1.0]], [2e-3])]
    for level in ("VERBOSE", "DEBUG", "INFO", "WARNING", "ERROR", "OFF"):
        logger.set_level(level)
        logger.println(f"--- level {level} ---", "FATAL")
        logger.println("Running scalar_curvature check 'demo.pass' on 1 samples", "DEBUG")
        for check in checks:
            status = "PASS" if check.passed else "FAIL"
            logger.println(f"{status} {check.name}: max_residual {check.max_residual:.3e}",
                           "INFO" if check.passed else "WARNING")
        logger.println("Building hspace 'demo' failed: t = 1 is outside an admissible interval", "ERROR")

    logger.set_level("INFO")
    logger.disable_tags()
    logger.println("Without tags.", "INFO")
    logger.enable_tags()
    logger.print("Sampling 100 points...", "INFO")
    logger.println(" done", "INFO")
    logger.print_separator(level="WARNING", sep_type="=-", size=15)
    logger.print_separator(sep_type="=")


if __name__ == "__main__":
    logger_demo()
