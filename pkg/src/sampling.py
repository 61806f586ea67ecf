"""Deterministic low-discrepancy sampling in coordinate boxes."""

import hashlib
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from src.errors import DimensionError


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower, upper] in chart coordinates; a zero-width side pins a coordinate."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self) -> None:
        lower = tuple(float(x) for x in self.lower)
        upper = tuple(float(x) for x in self.upper)
        if len(lower) != len(upper):
            raise DimensionError(f"Box bounds of lengths {len(lower)} and {len(upper)}")
        if any(a > b for a, b in zip(lower, upper)):
            raise ValueError(f"Box lower bound {lower} exceeds upper bound {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, p: Sequence[float]) -> bool:
        return all(a <= x <= b for a, x, b in zip(self.lower, p, self.upper))

    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))


def derive_seed(seed: int, name: str) -> int:
    """Stable per-check seed from the suite seed and the check name."""
    digest = hashlib.sha256(f"{int(seed)}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def halton_points(box: Box, count: int, seed: int, scramble: bool = True) -> np.ndarray:
    """``count`` scrambled Halton points in ``box`` (shape count × dim), reproducible per seed."""
    if count <= 0:
        return np.zeros((0, box.dim))
    sampler = qmc.Halton(d=box.dim, scramble=scramble, seed=np.random.default_rng(seed))
    unit = sampler.random(count)
    lower, upper = np.asarray(box.lower), np.asarray(box.upper)
    free = upper > lower
    points = np.tile(lower, (count, 1))
    if np.any(free):
        points[:, free] = qmc.scale(unit[:, free], lower[free], upper[free])
    return points
