"""Check results, the suite report and its canonical JSON form."""

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.errors import ReportWriteError


def _point(p: Sequence[float]) -> List[float]:
    return [float(x) for x in np.asarray(p, dtype=float).ravel()]


def sample_error(point: Sequence[float], error: BaseException) -> Dict[str, Any]:
    """Per-sample failure record: the point and the exception class name."""
    return {"point": _point(point), "kind": type(error).__name__}


@dataclass
class Check:
    """Outcome of one named check.

    ``passed`` holds exactly when ``max_residual <= tolerance`` and no sample raised.
    """

    name: str
    max_residual: float
    tolerance: float
    sample_count: int
    worst_point: List[float]
    passed: bool
    errors: List[Dict[str, Any]] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_samples(cls, name: str, tolerance: float, points: Sequence[Sequence[float]],
                     residuals: Sequence[Optional[float]], errors: Sequence[Dict[str, Any]] = (),
                     extras: Optional[Dict[str, Any]] = None) -> "Check":
        """Builds a check from per-sample residuals; None marks a sample that raised."""
        worst_point: List[float] = []
        max_residual = 0.0
        for p, r in zip(points, residuals):
            if r is None:
                continue
            r = float(r)
            if math.isnan(r):
                r = math.inf
            if not worst_point or r > max_residual:
                max_residual, worst_point = r, _point(p)
        errors = list(errors)
        passed = not errors and max_residual <= tolerance
        return cls(name, max_residual, float(tolerance), len(points), worst_point, passed, errors, dict(extras or {}))

    @classmethod
    def failed(cls, name: str, tolerance: float, kind: str, message: str = "") -> "Check":
        """A check that could not run at all (e.g. its construction raised)."""
        extras = {"message": message} if message else {}
        return cls(name, math.inf, float(tolerance), 0, [], False, [{"point": [], "kind": kind}], extras)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "sample_count": self.sample_count,
            "worst_point": list(self.worst_point),
            "pass": self.passed,
            "errors": [dict(e) for e in self.errors],
            "extras": self.extras,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Check":
        return cls(
            name=data["name"],
            max_residual=float(data["max_residual"]),
            tolerance=float(data["tolerance"]),
            sample_count=int(data["sample_count"]),
            worst_point=[float(x) for x in data["worst_point"]],
            passed=bool(data["pass"]),
            errors=[dict(e) for e in data.get("errors", [])],
            extras=dict(data.get("extras", {})),
        )


@dataclass
class CheckReport:
    checks: List[Check] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(f"No check named '{name}'")

    def sorted(self) -> "CheckReport":
        return CheckReport(sorted(self.checks, key=lambda c: c.name), dict(self.metadata))

    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> Dict[str, Any]:
        return {"checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)],
                "metadata": dict(self.metadata)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckReport":
        return cls([Check.from_dict(c) for c in data.get("checks", [])], dict(data.get("metadata", {})))

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        return cls.from_dict(json.loads(text))


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = "%.17g" % x
    if all(c not in text for c in ".eEn"):
        text += ".0"
    return text


def _encode(value: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(value[k], indent, level + 1)}"
                 for k in sorted(value, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in value) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def canonical_json(data: Any, indent: int = 2) -> str:
    """JSON with sorted keys and floats printed with 17 significant digits."""
    return _encode(data, indent, 0) + "\n"


def emit(report: CheckReport, path: str) -> None:
    """Writes the canonical report to ``path``.

    Raises:
        ReportWriteError: if the file cannot be written.
    """
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as file:
            file.write(report.to_json())
    except OSError as e:
        raise ReportWriteError(f"Cannot write report to '{path}': {e}") from e
