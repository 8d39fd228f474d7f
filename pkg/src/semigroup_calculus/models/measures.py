from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.integrate import quad

DensityFn = Callable[[np.ndarray], np.ndarray]
SymbolFn = Callable[[np.ndarray], np.ndarray]

SIGN_KINDS = ("positive", "signed", "complex")


@dataclass(frozen=True)
class TailEnvelope:
    """Bound ``|density(t)| <= coefficient * t**power * exp(-rate * t)`` valid for ``t >= 1``."""

    coefficient: float
    power: float
    rate: float = 0.0

    def __post_init__(self) -> None:
        if self.coefficient < 0 or self.rate < 0:
            raise ValueError("Tail envelope needs a nonnegative coefficient and rate.")

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        times = np.asarray(t, dtype=float)
        return self.coefficient * np.power(times, self.power) * np.exp(-self.rate * times)

    def scaled(self, factor: float) -> "TailEnvelope":
        return TailEnvelope(self.coefficient * abs(factor), self.power, self.rate)

    def shifted_power(self, delta: float) -> "TailEnvelope":
        return TailEnvelope(self.coefficient, self.power + delta, self.rate)


@dataclass(frozen=True, eq=False)
class MeasureRepr:
    """A measure on ``[0, inf)``: finitely many atoms plus an optional density.

    ``p0`` is the declared exponent at 0 (density ~ t**p0), ``envelope`` the
    declared behaviour at infinity. ``support_end`` marks a density that
    vanishes beyond that point. ``distribution_fn`` is the closed form of
    ``a([0, t])`` when one is known.
    """

    atoms: tuple[tuple[float, complex], ...] = ()
    density: Optional[DensityFn] = None
    p0: float = 0.0
    envelope: Optional[TailEnvelope] = None
    sign_info: str = "positive"
    support_end: Optional[float] = None
    distribution_fn: Optional[DensityFn] = None
    distribution_envelope: Optional[TailEnvelope] = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.sign_info not in SIGN_KINDS:
            raise ValueError(f"Unknown sign_info {self.sign_info!r}; expected one of {SIGN_KINDS}.")
        cleaned = tuple(sorted(((float(loc), weight) for loc, weight in self.atoms), key=lambda atom: atom[0]))
        if any(loc < 0 or not np.isfinite(loc) for loc, _ in cleaned):
            raise ValueError("Atom locations must be finite and nonnegative.")
        object.__setattr__(self, "atoms", cleaned)

    @property
    def has_density(self) -> bool:
        return self.density is not None

    @property
    def has_atoms(self) -> bool:
        return bool(self.atoms)

    @property
    def atom_locations(self) -> np.ndarray:
        return np.array([loc for loc, _ in self.atoms], dtype=float)

    @property
    def atom_weights(self) -> np.ndarray:
        return np.array([weight for _, weight in self.atoms])

    @property
    def total_atom_variation(self) -> float:
        return float(sum(abs(weight) for _, weight in self.atoms))

    def evaluate_density(self, t: np.ndarray) -> np.ndarray:
        times = np.asarray(t, dtype=float)
        if self.density is None:
            return np.zeros_like(times)
        values = self.density(times)
        if self.support_end is not None:
            values = np.where(times <= self.support_end, values, 0.0)
        return values

    def distribution(self, t: float | np.ndarray) -> np.ndarray:
        """Distribution function ``a(t) = a([0, t])`` normalised by ``a(0) = 0``."""

        times = np.atleast_1d(np.asarray(t, dtype=float))
        result = np.zeros(times.shape, dtype=complex if self.sign_info == "complex" else float)
        for index, moment in enumerate(times):
            if moment <= 0.0:
                continue
            total = sum(weight for loc, weight in self.atoms if loc <= moment)
            if self.distribution_fn is not None:
                total = total + self.distribution_fn(np.array([moment]))[0]
            elif self.density is not None:
                upper = moment if self.support_end is None else min(moment, self.support_end)
                if self.sign_info == "complex":
                    real_part = quad(lambda u: np.real(self.density(np.array([u]))[0]), 0.0, upper, limit=200)[0]
                    imag_part = quad(lambda u: np.imag(self.density(np.array([u]))[0]), 0.0, upper, limit=200)[0]
                    total = total + real_part + 1j * imag_part
                else:
                    total = total + quad(lambda u: float(self.density(np.array([u]))[0]), 0.0, upper, limit=200)[0]
            result[index] = total
        return result if np.ndim(t) else result[0]


@dataclass(frozen=True, eq=False)
class LaplaceSymbol:
    """g = La for a measure a on [0, inf), with pointwise evaluation for s < 0.

    A ``prefactor`` (c, d) other than (1, 0) means ``g(s) = (c + d s) (La)(s)``,
    so ``g(A)x = (La)(A)(cx + dAx)``. It carries symbols whose own measure
    is too singular at 0 for the panel rules.
    """

    name: str
    measure: MeasureRepr
    evaluate: SymbolFn
    parameters: Mapping[str, float] = field(default_factory=dict)
    inner: Optional["BernsteinSymbol"] = None
    prefactor: tuple[float, float] = (1.0, 0.0)

    def __call__(self, s):
        return self.evaluate(s)

    @property
    def kind(self) -> str:
        return "laplace"

    @property
    def has_prefactor(self) -> bool:
        return tuple(self.prefactor) != (1.0, 0.0)

    def premultiply(self, matrix: np.ndarray, x: np.ndarray) -> np.ndarray:
        c, d = self.prefactor
        if d == 0.0:
            return c * x if c != 1.0 else x
        return c * x + d * (matrix @ x)

    @property
    def label(self) -> str:
        items = [f"{key}={value:g}" for key, value in self.parameters.items()]
        if self.inner is not None:
            items.append(f"psi={self.inner.label}")
        return f"{self.name}({','.join(items)})" if items else self.name


@dataclass(frozen=True, eq=False)
class BernsteinSymbol:
    """Negative Bernstein function ``psi(s) = c0 + int (e^{su} - 1) u^{-1} drho(u)``.

    ``levy`` stores rho itself; the ``u^{-1}`` weight is applied by the engines.
    ``tail_density`` is ``f(r) = int_r^inf u^{-1} drho(u)`` when a closed form
    exists, with its own endpoint data ``tail_p0``/``tail_envelope``.
    """

    name: str
    c0: float
    levy: MeasureRepr
    evaluate: SymbolFn
    parameters: Mapping[str, float] = field(default_factory=dict)
    tail_density: Optional[DensityFn] = None
    tail_p0: float = 0.0
    tail_envelope: Optional[TailEnvelope] = None

    def __post_init__(self) -> None:
        if self.c0 > 0:
            raise ValueError(f"Bernstein constant c0 must be <= 0, got {self.c0}.")
        if self.levy.sign_info != "positive":
            raise ValueError("The Levy measure of a Bernstein symbol must be positive.")

    def __call__(self, s):
        return self.evaluate(s)

    @property
    def kind(self) -> str:
        return "bernstein"

    @property
    def label(self) -> str:
        if not self.parameters:
            return self.name
        params = ",".join(f"{key}={value:g}" for key, value in self.parameters.items())
        return f"{self.name}({params})"


@dataclass(frozen=True)
class SymbolCatalogEntry:
    name: str
    kind: str
    parameters: tuple[str, ...]
    ranges: str
    realizes: str
    builder: Callable[..., object]

    def build(self, *args: float):
        return self.builder(*args)


@dataclass(frozen=True, eq=False)
class ProductSymbol:
    """h = g * psi with the representing measure b of h (distribution given by b(t))."""

    g: LaplaceSymbol
    psi: BernsteinSymbol
    b_measure: MeasureRepr
    closed_form: bool = False

    @property
    def symbol(self) -> LaplaceSymbol:
        g, psi = self.g, self.psi
        return LaplaceSymbol(
            name=f"{g.label}*{psi.label}",
            measure=self.b_measure,
            evaluate=lambda s: g.evaluate(s) * psi.evaluate(s),
        )
