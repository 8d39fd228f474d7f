from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class Generator:
    """Square matrix A together with its certified semigroup growth data.

    ``growth_M`` and ``growth_omega`` bound ``||e^{tA}|| <= M e^{omega t}``;
    the optional ``decay_C``/``decay_delta`` pair bounds ``||e^{tA}|| <= C / t^delta``.
    """

    entries: np.ndarray
    growth_M: float = 1.0
    growth_omega: float = 0.0
    decay_C: Optional[float] = None
    decay_delta: Optional[float] = None
    injective: bool = True
    certified: bool = field(default=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.entries, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ValueError(f"Generator entries must be a non-empty square matrix, got shape {matrix.shape}.")
        if not np.iscomplexobj(matrix):
            matrix = matrix.astype(float)
        matrix.setflags(write=False)
        object.__setattr__(self, "entries", matrix)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries)

    @property
    def has_decay_profile(self) -> bool:
        return self.decay_C is not None and self.decay_delta is not None

    @property
    def is_contraction(self) -> bool:
        return self.growth_M <= 1.0 + 1e-9

    def with_profile(self, growth_M: float, growth_omega: float) -> "Generator":
        return replace(self, growth_M=float(growth_M), growth_omega=float(growth_omega), certified=True)

    def with_decay(self, decay_C: float, decay_delta: float) -> "Generator":
        return replace(self, decay_C=float(decay_C), decay_delta=float(decay_delta))

    def norm_bound(self, t: float | np.ndarray) -> np.ndarray:
        """Best certified bound on ``||T(t)||`` at the given times."""

        times = np.asarray(t, dtype=float)
        bound = self.growth_M * np.exp(self.growth_omega * times)
        if self.has_decay_profile:
            with np.errstate(divide="ignore"):
                algebraic = self.decay_C / np.power(times, self.decay_delta)
            bound = np.minimum(bound, algebraic)
        return bound


@dataclass(frozen=True, eq=False)
class SpectralData:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    condition_estimate: float
    inverse_vectors: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])
