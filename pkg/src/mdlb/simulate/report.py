"""Uniform result record for the numerical verification checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

__all__ = ["VerificationReport"]


@dataclass
class VerificationReport:
    """Outcome of one check: pass iff ``worst_margin >= -tolerance``.

    ``details`` holds check-specific diagnostics (grids, failing cases).
    Wall-clock runtime is intentionally not part of the serialized payload
    so reruns with one seed stay byte-identical; runners keep timing in the
    run manifest instead.
    """

    name: str
    params: dict
    worst_margin: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)
    runtime_seconds: Optional[float] = None

    @classmethod
    def from_margin(
        cls, name: str, params: dict, worst_margin: float, tolerance: float, **details
    ) -> "VerificationReport":
        return cls(
            name=name,
            params=dict(params),
            worst_margin=float(worst_margin),
            tolerance=float(tolerance),
            passed=bool(worst_margin >= -tolerance),
            details=details,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=float)

    def summary_line(self, with_runtime: bool = True) -> str:
        status = "PASS" if self.passed else "FAIL"
        timing = ""
        if with_runtime and self.runtime_seconds is not None:
            timing = f"  [{self.runtime_seconds:.2f}s]"
        return f"{status}  {self.name}: worst margin {self.worst_margin:.3e}{timing}"
