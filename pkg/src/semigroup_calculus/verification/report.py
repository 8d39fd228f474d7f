from __future__ import annotations

import math
from dataclasses import dataclass, field

from semigroup_calculus.models import ApplyResult


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    check: str
    deviation: float
    tolerance: float
    passed: bool
    error_estimate: float = 0.0
    T_star: float = 0.0
    panels_used: int = 0
    detail: str = ""


@dataclass
class VerificationReport:
    """Per-assertion outcomes of a verification run."""

    seed: int
    operator: str
    records: list[CheckRecord] = field(default_factory=list)

    def check(
        self,
        suite: str,
        check: str,
        deviation: float,
        tolerance: float,
        *,
        result: ApplyResult | None = None,
        detail: str = "",
    ) -> bool:
        deviation = float(deviation)
        passed = math.isfinite(deviation) and deviation <= tolerance
        record = CheckRecord(
            suite=suite,
            check=check,
            deviation=deviation,
            tolerance=float(tolerance),
            passed=passed,
            error_estimate=0.0 if result is None else result.error_estimate,
            T_star=0.0 if result is None else result.T_star,
            panels_used=0 if result is None else result.panels_used,
            detail=detail,
        )
        self.records.append(record)
        return passed

    def fail(self, suite: str, check: str, detail: str) -> None:
        self.records.append(CheckRecord(suite, check, math.inf, 0.0, False, detail=detail))

    @property
    def all_passed(self) -> bool:
        return bool(self.records) and all(record.passed for record in self.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [record for record in self.records if not record.passed]

    @property
    def suites(self) -> list[str]:
        seen: list[str] = []
        for record in self.records:
            if record.suite not in seen:
                seen.append(record.suite)
        return seen
