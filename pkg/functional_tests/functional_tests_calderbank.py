import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.calderbank import calderbank_metric, pole_check, retract_verdict
from src.config_manager import ConfigManager
from src.geometry import scalar_curvature, weyl_split
from src.library import Library
from src.logger import Logger


def calderbank_demo():
    config_manager = ConfigManager()
    logger = Logger(config_manager)
    library = Library(config_manager)

    logger.print_separator(sep_type="=")
    logger.println("Calderbank Functional Test Started!", "INFO")

    for name, p in (("flat-euclidean", [0.5, 0.1, -0.2, 0.3]), ("round-s3", [0.5, 0.1, -0.2, 0.3]),
                    ("hyperbolic-3", [0.5, 0.1, -0.2, 1.0])):
        H = calderbank_metric(library.weyl(name), logger=logger, name=name)
        logger.println(f"{name}: t_max {H.t_max}, scalar {scalar_curvature(H.g, p):.10f}, "
                       f"Weyl norm {weyl_split(H.g, p).norm:.3e}, pole check {pole_check(H, p[1:]):.3e}", "INFO")
        verdict = retract_verdict(H, [p], name=f"{name}.retract").checks[0]
        logger.println(f"  retract: pass {verdict.passed}, dilation {verdict.extras['dilation']}", "INFO")

    logger.println("Calderbank Functional Test Completed!", "INFO")
    logger.print_separator(sep_type="=")


if __name__ == "__main__":
    calderbank_demo()
