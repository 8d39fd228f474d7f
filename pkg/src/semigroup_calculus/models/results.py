from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

CONVERGED = "converged"
NON_CONVERGENT = "non_convergent"


@dataclass(frozen=True, eq=False)
class ApplyResult:
    """Output of one engine evaluation together with its quadrature diagnostics."""

    value: Optional[np.ndarray]
    error_estimate: float
    T_star: float
    panels_used: int
    domain_verdict: str
    tolerance: float = 0.0
    oracle_delta: Optional[float] = None
    route: str = ""
    notes: tuple[str, ...] = ()
    diagnostics: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def converged(
        cls,
        value: np.ndarray,
        *,
        error_estimate: float,
        T_star: float = 0.0,
        panels_used: int = 0,
        tolerance: float = 0.0,
        route: str = "",
        notes: tuple[str, ...] = (),
        diagnostics: Mapping[str, float] | None = None,
    ) -> "ApplyResult":
        """A converged result; a non-finite value or error estimate is downgraded to non-convergent."""

        array = np.asarray(value)
        if not (np.all(np.isfinite(array)) and np.isfinite(error_estimate)):
            return cls.non_convergent(
                "non-finite value or error estimate",
                T_star=T_star,
                panels_used=panels_used,
                route=route,
            )
        return cls(
            value=array,
            error_estimate=float(error_estimate),
            T_star=float(T_star),
            panels_used=int(panels_used),
            domain_verdict=CONVERGED,
            tolerance=float(tolerance),
            route=route,
            notes=tuple(notes),
            diagnostics=dict(diagnostics or {}),
        )

    @classmethod
    def non_convergent(
        cls,
        reason: str,
        *,
        value: np.ndarray | None = None,
        error_estimate: float = float("inf"),
        T_star: float = 0.0,
        panels_used: int = 0,
        route: str = "",
    ) -> "ApplyResult":
        return cls(
            value=None if value is None else np.asarray(value),
            error_estimate=float(error_estimate),
            T_star=float(T_star),
            panels_used=int(panels_used),
            domain_verdict=NON_CONVERGENT,
            route=route,
            notes=(reason,),
        )

    @property
    def is_converged(self) -> bool:
        return self.domain_verdict == CONVERGED

    def with_oracle(self, delta: Optional[float], note: str | None = None) -> "ApplyResult":
        notes = self.notes if note is None else self.notes + (note,)
        return replace(self, oracle_delta=None if delta is None else float(delta), notes=notes)

    def with_note(self, note: str, **diagnostics: float) -> "ApplyResult":
        merged = dict(self.diagnostics)
        merged.update(diagnostics)
        return replace(self, notes=self.notes + (note,), diagnostics=merged)

    def with_route(self, route: str) -> "ApplyResult":
        return replace(self, route=route)

    def summary(self) -> str:
        return (
            f"ApplyResult(route={self.route or '-'}, verdict={self.domain_verdict}, "
            f"error_estimate={self.error_estimate:.3e}, T_star={self.T_star:g}, "
            f"panels={self.panels_used})"
        )


@dataclass(frozen=True)
class AlphaLimitRow:
    alpha: float
    deviation: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.deviation <= self.bound
