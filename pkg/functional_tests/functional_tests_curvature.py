import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.geometry import MetricChart, einstein_residual, flat_metric, scalar_curvature, weyl_split
from src.logger import Logger
from src.weyl import WeylStructure, einstein_weyl_residual, weyl_scalar


def curvature_demo():
    logger = Logger()
    logger.print_separator(sep_type="=")
    logger.println("Curvature Functional Test Started!", "INFO")

    sphere = MetricChart.diagonal(("x1", "x2", "x3", "x4"), ["4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2"] * 4, name="S4")
    hyperbolic = MetricChart.diagonal(("a", "b", "c", "w"), ["w^-2"] * 4, guard="w > 0", name="H4")
    eguchi_hanson = MetricChart.from_strings(("r", "theta", "phi", "psi"), [
        ["1/(1 - r^-4)", "0", "0", "0"],
        ["0", "r^2/4", "0", "0"],
        ["0", "0", "r^2/4*sin(theta)^2 + r^2/4*(1 - r^-4)*cos(theta)^2", "r^2/4*(1 - r^-4)*cos(theta)"],
        ["0", "0", "r^2/4*(1 - r^-4)*cos(theta)", "r^2/4*(1 - r^-4)"],
    ], guard="r > 1 and sin(theta) > 0", name="Eguchi-Hanson")

    # Curvaturas conhecidas: 12, -12 e 0
    for g, p in ((sphere, [0.3, -0.2, 0.5, 0.1]), (hyperbolic, [0.1, 0.2, 0.3, 0.7]),
                 (eguchi_hanson, [2.0, 1.0, 0.3, 0.4])):
        split = weyl_split(g, p)
        logger.println(f"{g.name} at {p}: scalar {scalar_curvature(g, p):.12f}, "
                       f"einstein {einstein_residual(g, p):.3e}, W {split.norm:.3e}, "
                       f"W+ {split.self_dual:.3e}, W- {split.anti_self_dual:.3e}", "INFO")

    # Orientação oposta troca as partes autodual e anti-autodual
    flipped = weyl_split(eguchi_hanson.with_orientation(-1), [2.0, 1.0, 0.3, 0.4])
    logger.println(f"Eguchi-Hanson, reversed orientation: W+ {flipped.self_dual:.3e}, "
                   f"W- {flipped.anti_self_dual:.3e}", "INFO")

    logger.print_separator(sep_type="-=")
    round_s3 = WeylStructure(MetricChart.diagonal(("x1", "x2", "x3"), ["4/(1 + x1^2 + x2^2 + x3^2)^2"] * 3),
                             ("0", "0", "0"), name="round S3")
    skewed = WeylStructure(flat_metric(("x1", "x2", "x3")), ("1", "0", "0"), name="flat with alpha = dx1")
    for W in (round_s3, skewed):
        p = [0.2, -0.4, 0.1]
        logger.println(f"{W.name}: S {weyl_scalar(W, p):.12f}, Einstein-Weyl residual "
                       f"{einstein_weyl_residual(W, p):.3e}", "INFO")

    logger.println("Curvature Functional Test Completed!", "INFO")
    logger.print_separator(sep_type="=")


if __name__ == "__main__":
    curvature_demo()
