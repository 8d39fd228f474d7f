"""Hille-Phillips calculus: ``g(A)x = int_0^inf T(t)x da(t)`` for ``g = La``."""

from __future__ import annotations

import logging
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from semigroup_calculus.models import (
    AlphaLimitRow,
    ApplyResult,
    Generator,
    LaplaceSymbol,
    MeasureRepr,
    QuadratureSpec,
    TailEnvelope,
)
from semigroup_calculus.services.linalg_core import (
    GrowthProfileError,
    OracleDomainError,
    OracleUnavailableError,
    as_generator,
    as_vector,
    fit_decay_profile,
    oracle_apply,
    semigroup_orbit,
    time_scale,
)
from semigroup_calculus.services.quadrature import (
    DivergentIntegralError,
    integrate_vector,
    require_finite,
    truncation_for,
)
from semigroup_calculus.services.symbols import (
    MeasureValidationError,
    build_frac_power,
    build_inverse,
)

logger = logging.getLogger(__name__)

ALPHA_MONOTONE_NOISE = 1e-9


class NonInjectiveGeneratorError(DivergentIntegralError):
    """A is not injective, so ``-int T(t)x dt`` cannot converge for every x."""


def _norm(value: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(value)))


def attach_oracle(
    result: ApplyResult,
    A: Generator,
    fn: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
) -> ApplyResult:
    """Record ``||value - V f(Lambda) V^-1 x||`` when the spectral oracle is available."""

    if not result.is_converged:
        return result
    try:
        reference = oracle_apply(A, fn, x)
    except OracleUnavailableError as exc:
        return result.with_oracle(None, f"oracle unavailable: {exc}")
    except OracleDomainError as exc:
        return result.with_oracle(None, f"oracle undefined: {exc}")
    return result.with_oracle(_norm(result.value - reference))


def non_convergent_result(exc: DivergentIntegralError, route: str) -> ApplyResult:
    logger.warning("%s did not converge: %s", route, exc)
    return ApplyResult.non_convergent(
        str(exc),
        value=getattr(exc, "partial_value", None),
        error_estimate=getattr(exc, "error_estimate", float("inf")),
        T_star=getattr(exc, "T_star", 0.0),
        panels_used=getattr(exc, "panels_used", 0),
        route=route,
    )


def integrate_orbit(
    A: Generator,
    measure: MeasureRepr,
    y: np.ndarray,
    spec: QuadratureSpec,
    *,
    route: str,
    scale: Optional[float] = None,
) -> ApplyResult:
    """``int T(t)y dmu(t)`` with a certified truncation; raises on divergence."""

    reference = _norm(y) if scale is None else scale
    target = spec.target(reference)
    tail = truncation_for(A, measure, target, scale=_norm(y), mode=spec.truncation_mode)
    outcome = integrate_vector(
        lambda ts: semigroup_orbit(A, ts, y),
        measure,
        spec,
        tail,
        reference_norm=reference,
        time_scale=time_scale(A),
    )
    logger.debug(
        "%s: T*=%g, tail bound %.3e, %d panels, error %.3e.",
        route,
        outcome.T_star,
        outcome.tail_bound,
        outcome.panels_used,
        outcome.error_estimate,
    )
    require_finite(outcome.value, outcome.error_estimate, panels_used=outcome.panels_used, T_star=outcome.T_star)
    return ApplyResult.converged(
        outcome.value,
        error_estimate=outcome.error_estimate,
        T_star=outcome.T_star,
        panels_used=outcome.panels_used,
        tolerance=outcome.tolerance,
        route=route,
        diagnostics={"tail_bound": outcome.tail_bound, "quadrature_error": outcome.quadrature_error},
    )


def hp_apply(
    g: LaplaceSymbol,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    best_effort: bool = False,
    oracle: bool = True,
) -> ApplyResult:
    """Apply ``g(A)`` to x (a vector or an n-by-m block) by the defining integral.

    With ``best_effort`` a divergent or non-convergent integral is reported as a
    ``non_convergent`` result instead of raising.
    """

    spec = spec or QuadratureSpec.from_settings()
    generator = as_generator(A)
    vector = as_vector(generator, x)
    route = f"hille_phillips:{g.label}"
    try:
        result = integrate_orbit(generator, g.measure, g.premultiply(generator.entries, vector), spec, route=route)
    except DivergentIntegralError as exc:
        if not best_effort:
            raise
        return non_convergent_result(exc, route)
    return attach_oracle(result, generator, g.evaluate, vector) if oracle else result


def inverse_via_integral(
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    best_effort: bool = False,
) -> ApplyResult:
    """``A^{-1}x = -int_0^inf T(t)x dt``; reports the residual ``||A y - x||``."""

    generator = as_generator(A)
    vector = as_vector(generator, x)
    if not generator.injective:
        error = NonInjectiveGeneratorError("A is not injective; the inverse integral diverges.")
        if best_effort:
            return non_convergent_result(error, "inverse")
        raise error

    result = hp_apply(build_inverse(), generator, vector, spec, best_effort=best_effort)
    if not result.is_converged:
        return result
    residual = _norm(generator.entries @ result.value - vector)
    return result.with_route("inverse").with_note("residual ||A y - x||", residual=residual)


def neg_frac_power(
    A: Generator | np.ndarray,
    alpha: float,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    best_effort: bool = False,
) -> ApplyResult:
    """``(-A)^{-alpha} x = Gamma(alpha)^{-1} int T(t)x t^{alpha-1} dt``."""

    symbol = build_frac_power(alpha)
    return hp_apply(symbol, A, x, spec, best_effort=best_effort).with_route(f"neg_frac_power:{alpha:g}")


def neg_frac_power_shifted(
    A: Generator | np.ndarray,
    alpha: float,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    best_effort: bool = False,
) -> ApplyResult:
    """``(-A)^{-(1+alpha)}(-A)x``, the second construction of the fractional power."""

    symbol = build_frac_power(alpha)
    generator = as_generator(A)
    vector = as_vector(generator, x)
    shifted = build_frac_power(1.0 + alpha)
    result = hp_apply(shifted, generator, -(generator.entries @ vector), spec, best_effort=best_effort, oracle=False)
    result = result.with_route(f"neg_frac_power_shifted:{alpha:g}")
    return attach_oracle(result, generator, symbol.evaluate, vector)


def _distribution_measure(measure: MeasureRepr) -> MeasureRepr:
    """Measure with density ``a(t)``, the distribution function of ``measure``."""

    if measure.has_atoms:
        raise MeasureValidationError("Integration by parts needs a measure without atoms.")
    if measure.density is None:
        raise MeasureValidationError("Integration by parts needs a measure with a density.")

    if measure.distribution_fn is not None:
        distribution = measure.distribution_fn
    else:
        distribution = measure.distribution

    envelope = measure.distribution_envelope
    if envelope is None:
        total = quad(lambda u: abs(float(measure.evaluate_density(np.array([u]))[0])), 0.0, np.inf, limit=400)[0]
        envelope = TailEnvelope(total, 0.0, 0.0)

    return MeasureRepr(
        density=distribution,
        p0=0.0,
        envelope=envelope,
        sign_info=measure.sign_info,
        support_end=None,
        label=f"distribution of {measure.label}",
    )


def hp_apply_by_parts(
    g: LaplaceSymbol,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    best_effort: bool = False,
) -> ApplyResult:
    """``g(A)x = int_0^inf T(t)(-Ax) a(t) dt`` for a continuous measure with ``a(0) = 0``."""

    spec = spec or QuadratureSpec.from_settings()
    generator = as_generator(A)
    vector = as_vector(generator, x)
    measure = _distribution_measure(g.measure)
    route = f"by_parts:{g.label}"
    y = g.premultiply(generator.entries, vector)
    try:
        result = integrate_orbit(generator, measure, -(generator.entries @ y), spec, route=route, scale=_norm(y))
    except DivergentIntegralError as exc:
        if not best_effort:
            raise
        return non_convergent_result(exc, route)
    return attach_oracle(result, generator, g.evaluate, vector)


def _decay_data(A: Generator) -> tuple[float, float]:
    if A.has_decay_profile:
        return float(A.decay_C), float(A.decay_delta)
    return fit_decay_profile(A, 1.0), 1.0


def alpha_limit_bound(alpha: float, constant: float, delta: float, defect: float, x_norm: float) -> float:
    """``Gamma(alpha)^{-1} (||Ax - x||/(alpha+1) + C||x||/(delta-alpha) + ||x|| e^{-1})``."""

    return (defect / (alpha + 1.0) + constant * x_norm / (delta - alpha) + x_norm * np.exp(-1.0)) / gamma(alpha)


def alpha_limit_check(
    A: Generator | np.ndarray,
    x: np.ndarray,
    alphas: Iterable[float],
    spec: QuadratureSpec | None = None,
) -> list[AlphaLimitRow]:
    """Deviations ``||(-A)^{-alpha} x - x||`` along a sequence of alphas, with their bounds."""

    generator = as_generator(A)
    if not generator.is_contraction:
        raise GrowthProfileError(f"The alpha limit check needs a contraction semigroup, got M={generator.growth_M:g}.")
    vector = as_vector(generator, x)
    constant, delta = _decay_data(generator)
    defect = _norm(generator.entries @ vector - vector)
    x_norm = _norm(vector)

    rows = []
    for alpha in alphas:
        if not 0 < alpha < delta:
            raise GrowthProfileError(f"alpha={alpha} must lie in (0, delta={delta:g}).")
        result = neg_frac_power(generator, alpha, vector, spec)
        deviation = _norm(result.value - vector)
        rows.append(AlphaLimitRow(alpha=float(alpha), deviation=deviation, bound=alpha_limit_bound(alpha, constant, delta, defect, x_norm)))
        logger.debug("alpha=%g: deviation %.3e, bound %.3e.", alpha, deviation, rows[-1].bound)
    return rows


def alpha_limit_monotone(rows: list[AlphaLimitRow], noise: float = ALPHA_MONOTONE_NOISE) -> bool:
    """True when deviations do not increase as alpha decreases."""

    ordered = sorted(rows, key=lambda row: row.alpha, reverse=True)
    return all(later.deviation <= earlier.deviation + noise for earlier, later in zip(ordered, ordered[1:]))
