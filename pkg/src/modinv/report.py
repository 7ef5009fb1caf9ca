"""Machine-readable verdicts for degreewise verification checks."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field


@dataclass
class Failure:
    degree: int
    witness: str = ""

    def to_dict(self):
        return {"degree": self.degree, "witness_element_string": self.witness}


@dataclass
class Report:
    check: str
    degree_range: tuple
    failures: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if not self.failures else "fail"

    @property
    def passed(self) -> bool:
        return not self.failures

    def add_failure(self, degree: int, witness: str = ""):
        self.failures.append(Failure(degree, witness))

    def to_dict(self):
        out = {
            "check": self.check,
            "degree_range": list(self.degree_range),
            "status": self.status,
            "failures": [f.to_dict() for f in self.failures],
            "timings": self.timings,
        }
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def summary(self) -> str:
        lo, hi = self.degree_range
        line = f"check {self.check}: {self.status.upper()} [degrees {lo}..{hi}]"
        for f in self.failures[:5]:
            line += f"\n  degree {f.degree}: {f.witness}" if f.witness else f"\n  degree {f.degree}"
        if len(self.failures) > 5:
            line += f"\n  ... {len(self.failures) - 5} more failures"
        return line


class timer:
    """Context manager recording wall time into report.timings[name]."""

    def __init__(self, report: Report, name: str):
        self.report = report
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.report.timings[self.name] = round(time.perf_counter() - self.t0, 6)
        return False
