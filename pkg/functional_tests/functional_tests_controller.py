import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.config_manager import ConfigManager
from src.controller import Controller


def controller_demo():
    config_manager = ConfigManager()
    controller = Controller(config_manager)

    # Roda cada suíte embutida com poucas amostras
    for name in config_manager.suite_names():
        if name == "full":
            continue
        report = controller.run_suite(config_manager.get_suite(name), seed=0, samples=10)
        print(f"{name}: exit code {report.exit_code()}")
        for check in report.checks:
            print(f"  {check.name}: {'PASS' if check.passed else 'FAIL'} {check.max_residual:.3e}")


if __name__ == "__main__":
    controller_demo()
