"""Check records and JSON-ready reports."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def jsonable(x: Any) -> Any:
    """Complex numbers become ``[re, im]``; numpy scalars and arrays become plain JSON."""
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def canonical_dumps(obj: Any, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(jsonable(obj), sort_keys=True, indent=2)
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()


@dataclass
class Check:
    name: str
    lhs: Any
    rhs: Any
    gap: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.gap) and self.gap <= self.tolerance)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    @classmethod
    def relative(cls, name: str, lhs, rhs, tol: float, **details) -> "Check":
        gap = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs - rhs)
        return cls(name, lhs, rhs, float(gap), tol, details)

    @classmethod
    def up_to_sign(cls, name: str, lhs, rhs, tol: float, **details) -> "Check":
        """Relative gap ``min_s |lhs - s * rhs| / |rhs|`` over ``s = +-1``."""
        scale = abs(rhs) if rhs != 0 else 1.0
        gap = min(abs(lhs - rhs), abs(lhs + rhs)) / scale
        return cls(name, lhs, rhs, float(gap), tol, details)

    @classmethod
    def bound(cls, name: str, value: float, limit: float, **details) -> "Check":
        """Passes when ``value <= limit``."""
        return cls(name, value, limit, float(value), limit, details)

    @classmethod
    def at_least(cls, name: str, value: float, limit: float, **details) -> "Check":
        """Passes when ``value >= limit``; the gap is the shortfall."""
        return cls(name, value, limit, float(max(0.0, limit - value)), 0.0, details)

    def to_json(self) -> dict:
        out = {"name": self.name, "lhs": jsonable(self.lhs), "rhs": jsonable(self.rhs),
               "gap": self.gap, "tolerance": self.tolerance, "verdict": self.verdict}
        if self.details:
            out["details"] = jsonable(self.details)
        return out


def summarize(checks: list[Check]) -> dict:
    worst = max((c.gap for c in checks), default=0.0)
    return {"checks": len(checks), "failed": sum(not c.passed for c in checks),
            "worst_gap": worst, "verdict": "PASS" if all(c.passed for c in checks) else "FAIL"}
