"""Adaptive panel quadrature for the improper integrals of both calculi.

Integrals ``int_0^inf Phi(t) dmu(t)`` are split into the exact atom sum, a
density part on ``[0, T*]`` covered by dyadic panels graded toward 0, and a
certified tail bound beyond ``T*``. Panels are refined globally, largest
error first; the final sum runs in left-endpoint order so results are
bit-stable for a fixed input.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma, gammaincc, roots_jacobi, roots_legendre

from semigroup_calculus.models import (
    Generator,
    MeasureRepr,
    QuadratureOutcome,
    QuadratureSpec,
    TailBound,
    TailEnvelope,
)

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

MAX_GRADING_LEVELS = 60
MAX_DOUBLINGS = 400
ROUNDOFF_FACTOR = 64.0 * np.finfo(float).eps


class DivergentIntegralError(ArithmeticError):
    """The defining integral does not converge numerically (x outside D0)."""


class DivergentTailError(DivergentIntegralError):
    def __init__(self, message: str, *, power: float | None = None, rate: float | None = None) -> None:
        super().__init__(message)
        self.power = power
        self.rate = rate


class NonConvergentIntegralError(DivergentIntegralError):
    def __init__(
        self,
        message: str,
        *,
        partial_value: np.ndarray | None = None,
        error_estimate: float = float("inf"),
        panels_used: int = 0,
        T_star: float = 0.0,
    ) -> None:
        super().__init__(message)
        self.partial_value = partial_value
        self.error_estimate = error_estimate
        self.panels_used = panels_used
        self.T_star = T_star


def require_finite(value: np.ndarray, error_estimate: float, *, panels_used: int = 0, T_star: float = 0.0) -> None:
    """Raise :class:`NonConvergentIntegralError` for a non-finite value or error estimate."""

    if np.all(np.isfinite(value)) and math.isfinite(error_estimate):
        return
    raise NonConvergentIntegralError(
        f"Quadrature produced a non-finite value or error estimate ({error_estimate!r}).",
        error_estimate=float("inf"),
        panels_used=panels_used,
        T_star=T_star,
    )


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(order)
    return nodes, weights


@lru_cache(maxsize=None)
def _jacobi(order: int, exponent: float) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_jacobi(order, 0.0, exponent)
    return nodes, weights


def _norm(value: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(value)))


# ---------------------------------------------------------------------------
# tail bounds


def _exponential_tail(M: float, coefficient: float, power: float, rate: float, T_star: float) -> Optional[float]:
    """``M * c * int_T^inf t^p e^{-rate t} dt`` in closed form, None if divergent."""

    if coefficient == 0.0:
        return 0.0
    if rate > 1e-300:
        if power <= 0:
            return M * coefficient * T_star**power * math.exp(-rate * T_star) / rate
        return M * coefficient * gamma(power + 1) * gammaincc(power + 1, rate * T_star) / rate ** (power + 1)
    if power < -1:
        return M * coefficient * T_star ** (power + 1) / (-power - 1)
    return None


def profile_tail_bound(
    M: float,
    omega: float,
    envelope: TailEnvelope,
    T_star: float,
    decay: tuple[float, float] | None = None,
    mode: str = "exponential_tail",
) -> float:
    """Bound on ``int_T*^inf profile(t) |density(t)| dt`` for ``T* >= 1``.

    ``profile`` is ``M e^{omega t}`` and, when ``decay = (C, delta)`` is given,
    also ``C t^{-delta}``. ``mode`` picks which profile is preferred when both
    give a finite bound.
    """

    if T_star < 1.0:
        raise ValueError("Tail envelopes are only valid for T* >= 1.")

    exponential = _exponential_tail(M, envelope.coefficient, envelope.power, envelope.rate - omega, T_star)
    algebraic = None
    if decay is not None:
        constant, delta = decay
        algebraic = _exponential_tail(constant, envelope.coefficient, envelope.power - delta, envelope.rate, T_star)

    preferred, fallback = (exponential, algebraic) if mode == "exponential_tail" else (algebraic, exponential)
    if preferred is not None:
        return float(preferred)
    if fallback is not None:
        return float(fallback)
    raise DivergentTailError(
        f"Growth profile against density envelope t^{envelope.power:g} e^(-{envelope.rate:g} t) is not integrable at infinity.",
        power=envelope.power,
        rate=envelope.rate,
    )


def choose_truncation(bound_fn: Callable[[float], float], target: float, start: float = 1.0) -> TailBound:
    """Smallest ``T* = start * 2^k`` whose tail bound is at most ``target``."""

    T_star = start
    for _ in range(MAX_DOUBLINGS):
        bound = bound_fn(T_star)
        if bound <= target:
            return TailBound(T_star=T_star, bound=bound)
        T_star *= 2.0
    raise DivergentTailError(f"Tail bound did not fall below {target:.3e} before T*={T_star:.3e}.")


def tail_bound_for(
    A: Generator,
    mu: MeasureRepr,
    T_star: float,
    *,
    scale: float = 1.0,
    mode: str = "exponential_tail",
) -> TailBound:
    """Certified bound on the discarded tail ``int_T*^inf ||T(t)|| |density(t)| dt`` (times ``scale``)."""

    if mu.density is None or (mu.support_end is not None and T_star >= mu.support_end):
        return TailBound(T_star=T_star, bound=0.0)
    if mu.envelope is None:
        raise DivergentTailError("Measure declares no behaviour at infinity; the tail cannot be certified.")
    decay = (A.decay_C, A.decay_delta) if A.has_decay_profile else None
    bound = profile_tail_bound(A.growth_M, A.growth_omega, mu.envelope, T_star, decay=decay, mode=mode)
    return TailBound(T_star=T_star, bound=bound * scale)


def truncation_for(
    A: Generator,
    mu: MeasureRepr,
    target: float,
    *,
    scale: float = 1.0,
    mode: str = "exponential_tail",
) -> TailBound:
    if mu.density is None:
        return TailBound(T_star=1.0, bound=0.0)
    if mu.support_end is not None:
        return TailBound(T_star=max(mu.support_end, np.finfo(float).tiny), bound=0.0)
    return choose_truncation(lambda T: tail_bound_for(A, mu, T, scale=scale, mode=mode).bound, target)


# ---------------------------------------------------------------------------
# panel rules


@dataclass
class _Panel:
    lower: float
    upper: float
    kind: str
    coarse: np.ndarray
    left: np.ndarray
    right: np.ndarray
    error: float
    floor: float

    @property
    def value(self) -> np.ndarray:
        return self.left + self.right

    @property
    def refinable(self) -> bool:
        if self.error <= self.floor:
            return False
        return (self.upper - self.lower) > 1e-14 * max(1.0, abs(self.upper))


class _PanelIntegrator:
    """Evaluates panel rules for ``int Phi(t) w(t) dt`` with a declared exponent at 0."""

    def __init__(self, phi: Integrand, weight: Callable[[np.ndarray], np.ndarray], p0: float, spec: QuadratureSpec) -> None:
        self._phi = phi
        self._weight = weight
        self._p0 = p0
        self._order = spec.panel_order
        self._singular_kind = "plain"
        if -1.0 < p0 < 0.0:
            self._singular_kind = "jacobi" if spec.t_min_exponent_handling == "jacobi_weights" else "substitution"
        elif p0 <= -1.0:
            raise DivergentIntegralError(f"Density exponent {p0:g} at 0 is not integrable.")
        self.evaluations = 0

    @property
    def singular_kind(self) -> str:
        return self._singular_kind

    def _nodes(self, lower: float, upper: float, kind: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Physical nodes, quadrature weights and the multiplier applied to ``w(t)``."""

        if kind == "plain":
            x, w = _legendre(self._order)
            half = 0.5 * (upper - lower)
            return half * x + 0.5 * (upper + lower), half * w, np.ones_like(x)

        p0 = self._p0
        if kind == "substitution":
            exponent = p0 + 1.0
            x, w = _legendre(self._order)
            top = upper**exponent
            u = 0.5 * top * (x + 1.0)
            t = np.maximum(u ** (1.0 / exponent), np.finfo(float).tiny)
            # t^{p0} dt = du / exponent
            return t, 0.5 * top * w / exponent, np.power(t, -p0)

        x, w = _jacobi(self._order, p0)
        t = np.maximum(0.5 * upper * (x + 1.0), np.finfo(float).tiny)
        return t, (0.5 * upper) ** (p0 + 1.0) * w, np.power(t, -p0)

    def rule(self, lower: float, upper: float, kind: str) -> tuple[np.ndarray, float]:
        t, w, multiplier = self._nodes(lower, upper, kind)
        values = self._phi(t)
        weights = w * multiplier * self._weight(t)
        self.evaluations += t.size
        total = np.tensordot(weights, values, axes=(0, 0))
        magnitude = np.tensordot(np.abs(weights), np.abs(values), axes=(0, 0))
        return total, _norm(magnitude)

    def panel(self, lower: float, upper: float, kind: str, coarse: np.ndarray | None = None) -> _Panel:
        if coarse is None:
            coarse, _ = self.rule(lower, upper, kind)
        middle = 0.5 * (lower + upper)
        left_kind = kind
        right_kind = "plain"
        left, left_abs = self.rule(lower, middle, left_kind)
        right, right_abs = self.rule(middle, upper, right_kind)
        error = _norm(coarse - (left + right))
        floor = ROUNDOFF_FACTOR * (left_abs + right_abs)
        return _Panel(lower, upper, kind, coarse, left, right, error, floor)

    def split(self, panel: _Panel) -> tuple[_Panel, _Panel]:
        middle = 0.5 * (panel.lower + panel.upper)
        first = self.panel(panel.lower, middle, panel.kind, coarse=panel.left)
        second = self.panel(middle, panel.upper, "plain", coarse=panel.right)
        children_error = first.error + second.error
        if children_error > panel.error > 0.0:
            shrink = panel.error / children_error
            first.error *= shrink
            second.error *= shrink
        return first, second


def _graded_breakpoints(lower: float, upper: float, inner: float) -> list[float]:
    """Dyadic breakpoints ``upper / 2^k`` from ``upper`` down toward ``lower``."""

    points = [upper]
    if lower > 0.0:
        while points[-1] / 2.0 > lower and len(points) < MAX_DOUBLINGS:
            points.append(points[-1] / 2.0)
        points.append(lower)
    else:
        levels = 0
        floor = max(inner, upper * 2.0 ** (-MAX_GRADING_LEVELS))
        while points[-1] / 2.0 >= floor and levels < MAX_GRADING_LEVELS:
            points.append(points[-1] / 2.0)
            levels += 1
        points.append(0.0)
    return sorted(set(points))


def _refine(
    integrator: _PanelIntegrator,
    breakpoints: list[float],
    spec: QuadratureSpec,
    reference_norm: float,
) -> tuple[np.ndarray, float, int, float]:
    counter = itertools.count()
    panels: list[_Panel] = []
    for lower, upper in zip(breakpoints[:-1], breakpoints[1:]):
        kind = integrator.singular_kind if lower == 0.0 else "plain"
        panels.append(integrator.panel(lower, upper, kind))

    heap = [(-panel.error, next(counter), panel) for panel in panels]
    heapq.heapify(heap)
    finished: list[_Panel] = []
    running = sum((panel.value for panel in panels[1:]), panels[0].value)
    total_error = sum(panel.error for panel in panels)
    count = len(panels)

    def target() -> float:
        return spec.target(max(reference_norm, _norm(running)))

    while heap and total_error > target():
        _, _, panel = heapq.heappop(heap)
        if not panel.refinable:
            finished.append(panel)
            continue
        if count + 1 > spec.max_panels:
            heapq.heappush(heap, (-panel.error, next(counter), panel))
            leftover = finished + [item for _, _, item in heap]
            partial = _ordered_sum(leftover)
            raise NonConvergentIntegralError(
                f"Panel budget {spec.max_panels} exhausted with error estimate {total_error:.3e}.",
                partial_value=partial,
                error_estimate=total_error,
                panels_used=count,
            )
        first, second = integrator.split(panel)
        running = running - panel.value + first.value + second.value
        total_error += first.error + second.error - panel.error
        count += 1
        heapq.heappush(heap, (-first.error, next(counter), first))
        heapq.heappush(heap, (-second.error, next(counter), second))

    finished.extend(item for _, _, item in heap)
    value = _ordered_sum(finished)
    total_error = float(sum(panel.error for panel in sorted(finished, key=lambda item: item.lower)))
    require_finite(value, total_error, panels_used=count)
    tolerance = max(target(), float(sum(panel.floor for panel in finished)))
    if total_error > tolerance:
        raise NonConvergentIntegralError(
            f"Panels collapsed before reaching tolerance (error {total_error:.3e} > {tolerance:.3e}).",
            partial_value=value,
            error_estimate=total_error,
            panels_used=count,
        )
    return value, total_error, count, tolerance


def _ordered_sum(panels: list[_Panel]) -> np.ndarray:
    ordered = sorted(panels, key=lambda panel: panel.lower)
    total = ordered[0].value.copy()
    for panel in ordered[1:]:
        total = total + panel.value
    return total


# ---------------------------------------------------------------------------
# public integrators


def _atom_sum(phi: Integrand, mu: MeasureRepr) -> Optional[np.ndarray]:
    if not mu.has_atoms:
        return None
    locations = mu.atom_locations
    values = phi(locations)
    total = None
    for weight, value in zip(mu.atom_weights, values):
        contribution = weight * value
        total = contribution if total is None else total + contribution
    return total


def integrate_density(
    phi: Integrand,
    mu: MeasureRepr,
    lower: float,
    upper: float,
    spec: QuadratureSpec,
    *,
    reference_norm: float = 0.0,
    time_scale: float = 1.0,
) -> QuadratureOutcome:
    """Adaptive integration of ``Phi(t) density(t)`` over ``[lower, upper]``."""

    if mu.density is None:
        raise ValueError("Measure has no density to integrate.")
    if not upper > lower >= 0.0:
        raise ValueError(f"Invalid integration interval [{lower}, {upper}].")

    p0 = mu.p0 if lower == 0.0 else 0.0
    integrator = _PanelIntegrator(phi, mu.evaluate_density, p0, spec)
    inner = time_scale * 1e-3
    breakpoints = _graded_breakpoints(lower, upper, inner)
    value, error, count, tolerance = _refine(integrator, breakpoints, spec, reference_norm)
    logger.debug(
        "Density integral on [%.3g, %.3g]: %d panels, %d evaluations, error %.3e.",
        lower,
        upper,
        count,
        integrator.evaluations,
        error,
    )
    return QuadratureOutcome(
        value=value,
        error_estimate=error,
        panels_used=count,
        T_star=upper,
        quadrature_error=error,
        tail_bound=0.0,
        tolerance=tolerance,
    )


def integrate_interval(
    phi: Integrand,
    a: float,
    b: float,
    spec: QuadratureSpec,
    *,
    weight: Callable[[np.ndarray], np.ndarray] | None = None,
    reference_norm: float = 0.0,
    pieces: int | None = None,
) -> QuadratureOutcome:
    """Adaptive Gauss-Legendre for a smooth weight on a finite interval."""

    if not b > a:
        raise ValueError(f"Invalid integration interval [{a}, {b}].")
    weight_fn = weight if weight is not None else np.ones_like
    integrator = _PanelIntegrator(phi, weight_fn, 0.0, spec)
    count = pieces if pieces is not None else max(1, int(math.ceil((b - a) / 4.0)))
    breakpoints = [float(point) for point in np.linspace(a, b, count + 1)]
    value, error, used, tolerance = _refine(integrator, breakpoints, spec, reference_norm)
    return QuadratureOutcome(
        value=value,
        error_estimate=error,
        panels_used=used,
        T_star=b,
        quadrature_error=error,
        tail_bound=0.0,
        tolerance=tolerance,
    )


def integrate_vector(
    phi: Integrand,
    mu: MeasureRepr,
    spec: QuadratureSpec,
    tail: TailBound,
    *,
    reference_norm: float = 0.0,
    time_scale: float = 1.0,
) -> QuadratureOutcome:
    """``int_0^inf Phi(t) dmu(t)``: exact atoms, graded density panels on ``[0, T*]`` and the tail bound."""

    atoms = _atom_sum(phi, mu)
    if mu.density is None:
        if atoms is None:
            raise ValueError("Measure has neither atoms nor a density.")
        return QuadratureOutcome(
            value=atoms,
            error_estimate=0.0,
            panels_used=0,
            T_star=tail.T_star,
            quadrature_error=0.0,
            tail_bound=0.0,
            tolerance=spec.target(reference_norm),
        )

    reference = max(reference_norm, _norm(atoms) if atoms is not None else 0.0)
    outcome = integrate_density(
        phi,
        mu,
        0.0,
        tail.T_star,
        spec,
        reference_norm=reference,
        time_scale=time_scale,
    )
    value = outcome.value if atoms is None else atoms + outcome.value
    tolerance = outcome.tolerance + max(tail.bound, spec.target(reference))
    return QuadratureOutcome(
        value=value,
        error_estimate=outcome.quadrature_error + tail.bound,
        panels_used=outcome.panels_used,
        T_star=tail.T_star,
        quadrature_error=outcome.quadrature_error,
        tail_bound=tail.bound,
        tolerance=tolerance,
    )
