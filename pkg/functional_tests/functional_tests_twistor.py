import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
from src.config_manager import ConfigManager
from src.library import Library, build_seeds
from src.logger import Logger
from src.twistor import (closed_form_rotational, contact_residual, incidence_point, invert_incidence,
                         sky_tangent_pairing, submersion_from_surface)


def twistor_demo():
    logger = Logger()
    library = Library(ConfigManager())

    logger.print_separator(sep_type="=")
    logger.println("Twistor Pipeline Functional Test Started!", "INFO")

    S, table = library.surface("model-rotational")
    uv = [0.3, 0.8, -0.5, 0.2]
    x = incidence_point(S, uv)
    logger.println(f"Contact residual at {uv}: {abs(contact_residual(S, uv)):.3e}", "INFO")
    logger.println(f"Incidence point: {x}", "INFO")

    # Newton a partir de um palpite perturbado
    found = invert_incidence(S, x, np.asarray(uv) + 0.01)
    logger.println(f"Recovered parameters: {np.round(found, 12)}", "INFO")

    phi = submersion_from_surface(S, build_seeds(S, table), name="phi")
    for p in ([0.0, 1.0, 0.0, 0.0], [0.5, -0.3, 0.8, 0.2], [-1.2, 0.4, 0.4, -0.9]):
        logger.println(f"phi({p}) = {phi.value(p)}, closed form {closed_form_rotational(p)}", "INFO")

    logger.println(f"Sky pairing at x_D = 0.4: {sky_tangent_pairing([0.0, 0.0, 0.0, 0.4], [1, 1]):.6f}", "INFO")

    S, _ = library.surface("contact-violating")
    logger.println(f"Contact residual of the violating surface: {abs(contact_residual(S, [0, 0, 0, 0])):.3e}",
                   "WARNING")

    logger.println("Twistor Pipeline Functional Test Completed!", "INFO")
    logger.print_separator(sep_type="=")


if __name__ == "__main__":
    twistor_demo()
