from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from semigroup_calculus.config.settings import Settings

ENDPOINT_MODES = ("substitution", "jacobi_weights")
TRUNCATION_MODES = ("exponential_tail", "algebraic_tail")


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_panels: int = 4096
    panel_order: int = 32
    t_min_exponent_handling: str = "substitution"
    truncation_mode: str = "exponential_tail"

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("Quadrature tolerances must be positive.")
        if self.panel_order < 2:
            raise ValueError("panel_order must be at least 2.")
        if self.max_panels < 1:
            raise ValueError("max_panels must be positive.")
        if self.t_min_exponent_handling not in ENDPOINT_MODES:
            raise ValueError(f"t_min_exponent_handling must be one of {ENDPOINT_MODES}.")
        if self.truncation_mode not in TRUNCATION_MODES:
            raise ValueError(f"truncation_mode must be one of {TRUNCATION_MODES}.")

    @classmethod
    def from_settings(cls, settings: "Settings | None" = None) -> "QuadratureSpec":
        if settings is None:
            from semigroup_calculus.config.settings import get_settings

            settings = get_settings()
        return cls(
            rel_tol=settings.rel_tol,
            abs_tol=settings.abs_tol,
            max_panels=settings.max_panels,
            panel_order=settings.panel_order,
        )

    def with_overrides(self, **overrides) -> "QuadratureSpec":
        present = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **present) if present else self

    def target(self, reference_norm: float) -> float:
        return max(self.abs_tol, self.rel_tol * float(reference_norm))


@dataclass(frozen=True)
class TailBound:
    T_star: float
    bound: float
    estimated: bool = False

    def __post_init__(self) -> None:
        if not self.T_star > 0:
            raise ValueError("Truncation point must be positive.")
        if self.bound < 0 or not np.isfinite(self.bound):
            raise ValueError("Tail bound must be finite and nonnegative.")

    def scaled(self, factor: float) -> "TailBound":
        return TailBound(self.T_star, self.bound * abs(factor), self.estimated)


@dataclass(frozen=True, eq=False)
class QuadratureOutcome:
    value: np.ndarray
    error_estimate: float
    panels_used: int
    T_star: float
    quadrature_error: float
    tail_bound: float
    tolerance: float

    def __iter__(self):
        yield self.value
        yield self.error_estimate
