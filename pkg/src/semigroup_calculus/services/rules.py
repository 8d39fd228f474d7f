"""Calculus rules: products, reciprocals, the log-inverse and composition."""

from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from semigroup_calculus.models import (
    ApplyResult,
    BernsteinSymbol,
    Generator,
    LaplaceSymbol,
    MeasureRepr,
    ProductSymbol,
    QuadratureSpec,
    TailEnvelope,
)
from semigroup_calculus.services.bp_engine import bp_apply, materialize_bernstein
from semigroup_calculus.services.hp_engine import attach_oracle, hp_apply, integrate_orbit
from semigroup_calculus.services.linalg_core import (
    OracleDomainError,
    OracleUnavailableError,
    as_generator,
    as_vector,
    make_generator,
    oracle_apply,
    resolvent_orbit,
    resolvent_solve,
)
from semigroup_calculus.services.quadrature import integrate_interval
from semigroup_calculus.services.symbols import (
    bernstein_integrability,
    build_log_inverse,
    build_recip_log,
    is_stable_half,
    levy_tail,
)

logger = logging.getLogger(__name__)

LOG_ROUTES = ("volterra", "resolvent")
MAX_TAU = 4096.0
_TINY = 1e-280


class RuleHypothesisError(ValueError):
    pass


class CompositionRouteUnavailable(LookupError):
    pass


def _norm(value: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(value)))


def _require_stable(A: Generator, rule: str) -> None:
    if A.growth_omega >= 0:
        raise RuleHypothesisError(f"{rule} needs a uniformly stable semigroup (omega < 0), got omega={A.growth_omega:g}.")


def _require_positive_continuous(g: LaplaceSymbol, rule: str) -> None:
    measure = g.measure
    if g.has_prefactor:
        raise RuleHypothesisError(f"{rule} needs g = La directly; {g.label} carries a polynomial prefactor.")
    if measure.has_atoms:
        raise RuleHypothesisError(f"{rule} needs a continuous measure; {g.label} has atoms.")
    if measure.sign_info != "positive":
        raise RuleHypothesisError(f"{rule} needs a positive measure; {g.label} is {measure.sign_info}.")
    if measure.density is None:
        raise RuleHypothesisError(f"{rule} needs a measure with a density; {g.label} has none.")


# ---------------------------------------------------------------------------
# products


def product_distribution(g: LaplaceSymbol, psi: BernsteinSymbol, t: float) -> float:
    """``b(t) = psi(0) a(t) + int (a(t - u) - a(t)) u^{-1} drho(u)`` with ``a(t - u) = 0`` for ``u > t``."""

    if t <= 0:
        return 0.0
    measure = g.measure

    def a(moment: float) -> float:
        return float(np.real(measure.distribution(moment))) if moment > 0 else 0.0

    a_t = a(t)
    total = psi.c0 * a_t
    for loc, weight in psi.levy.atoms:
        if loc == 0.0:
            # limit of (a(t - u) - a(t))/u as u -> 0
            total -= weight * float(np.real(measure.evaluate_density(np.array([t]))[0]))
        else:
            total += weight * (a(t - loc) - a_t) / loc

    levy = psi.levy
    if levy.density is not None:
        p0 = levy.p0

        slope_at_t = -float(np.real(measure.evaluate_density(np.array([t]))[0]))

        # QAWS samples the endpoints; u -> 0 uses the limit -a'(t)
        def core(u: float) -> float:
            point = max(u, _TINY)
            rho = float(levy.evaluate_density(np.array([point]))[0]) * point ** (-p0)
            slope = slope_at_t if u < 1e-8 * t else (a(t - u) - a_t) / u
            return slope * rho

        near = quad(core, 0.0, t, weight="alg", wvar=(p0, 0.0), limit=400, epsabs=0.0, epsrel=1e-11)[0]
        total += near - a_t * levy_tail(psi, t)
    return total


def _is_power_pair(g: LaplaceSymbol, psi: BernsteinSymbol) -> bool:
    return g.name == "frac_power" and psi.name == "neg_frac_power_bernstein" and psi.c0 == 0.0


def product_symbol(g: LaplaceSymbol, psi: BernsteinSymbol) -> ProductSymbol:
    """Representing data of ``h = g psi``.

    ``b_measure.distribution_fn`` is ``b`` from the product formula; a closed
    form is used for the power pair and for ``psi(s) = s``.
    """

    _require_positive_continuous(g, "The product rule")

    if _is_power_pair(g, psi):
        alpha, beta = g.parameters["alpha"], psi.parameters["beta"]
        if alpha <= beta:
            raise RuleHypothesisError(f"-(-s)^{beta - alpha:g} is not a Laplace transform; need alpha > beta.")
        order = alpha - beta
        b_measure = MeasureRepr(
            density=lambda t: -np.power(np.asarray(t, dtype=float), order - 1.0) / gamma(order),
            p0=order - 1.0,
            envelope=TailEnvelope(1.0 / gamma(order), order - 1.0, 0.0),
            sign_info="signed",
            distribution_fn=lambda t: -np.power(np.asarray(t, dtype=float), order) / gamma(order + 1.0),
            distribution_envelope=TailEnvelope(1.0 / gamma(order + 1.0), order, 0.0),
            label=f"-t^{order - 1:g}/Gamma({order:g})",
        )
        return ProductSymbol(g=g, psi=psi, b_measure=b_measure, closed_form=True)

    if psi.name == "identity":
        measure = g.measure
        b_measure = MeasureRepr(
            sign_info="signed",
            distribution_fn=lambda t: -measure.evaluate_density(t),
            distribution_envelope=measure.envelope,
            label=f"-density of {g.label}",
        )
        return ProductSymbol(g=g, psi=psi, b_measure=b_measure, closed_form=True)

    envelope = g.measure.distribution_envelope
    if envelope is None:
        raise RuleHypothesisError(f"{g.label} declares no distribution envelope; b cannot be bounded.")
    head, tail = bernstein_integrability(psi, 1.0)
    # |b(t)| <= (|c0| + 2 rho-mass terms) times the envelope of a
    factor = abs(psi.c0) + 2.0 * (head + tail)

    def distribution(t: np.ndarray) -> np.ndarray:
        points = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([product_distribution(g, psi, float(point)) for point in points])

    b_measure = MeasureRepr(
        sign_info="signed",
        distribution_fn=distribution,
        distribution_envelope=envelope.scaled(factor),
        label=f"b for {g.label}*{psi.label}",
    )
    return ProductSymbol(g=g, psi=psi, b_measure=b_measure, closed_form=False)


def _apply_distribution(
    b: Callable[[np.ndarray], np.ndarray],
    p0: float,
    envelope: TailEnvelope,
    A: Generator,
    x: np.ndarray,
    spec: QuadratureSpec,
    route: str,
) -> ApplyResult:
    """``int T(t)(-Ax) b(t) dt``."""

    measure = MeasureRepr(density=b, p0=p0, envelope=envelope, sign_info="signed")
    return integrate_orbit(A, measure, -(A.entries @ x), spec, route=route, scale=_norm(x))


def product_apply(product: ProductSymbol, A: Generator | np.ndarray, x: np.ndarray, spec: QuadratureSpec | None = None) -> ApplyResult:
    """``h(A)x`` from the representing data of ``h = g psi``."""

    spec = spec or QuadratureSpec.from_settings()
    generator = as_generator(A)
    vector = as_vector(generator, x)
    b_measure = product.b_measure
    label = f"h_direct:{product.g.label}*{product.psi.label}"

    if b_measure.density is not None:
        return hp_apply(product.symbol, generator, vector, spec).with_route(label)

    if product.psi.name == "identity":
        # b = -a' keeps the endpoint exponent of the density of g
        p0 = product.g.measure.p0
    else:
        p0 = 0.0
    result = _apply_distribution(
        b_measure.distribution_fn,
        p0,
        b_measure.distribution_envelope,
        generator,
        vector,
        spec,
        label,
    )
    if not product.closed_form:
        result = result.with_note("tail beyond T* estimated from the envelope of a, not certified")
    return attach_oracle(result, generator, product.symbol.evaluate, vector)


def _combine(outer: ApplyResult, inner: ApplyResult, route: str) -> ApplyResult:
    return ApplyResult.converged(
        outer.value,
        error_estimate=outer.error_estimate + inner.error_estimate,
        T_star=max(outer.T_star, inner.T_star),
        panels_used=outer.panels_used + inner.panels_used,
        tolerance=outer.tolerance + inner.tolerance,
        route=route,
        notes=("error estimates of the two stages added",),
    )


def multiply_apply(
    g: LaplaceSymbol,
    psi: BernsteinSymbol,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
) -> dict[str, ApplyResult]:
    """``h(A)x``, ``psi(A)g(A)x`` and ``g(A)psi(A)x`` for ``h = g psi``."""

    spec = spec or QuadratureSpec.from_settings()
    generator = as_generator(A)
    vector = as_vector(generator, x)
    product = product_symbol(g, psi)

    def h(s):
        return g.evaluate(s) * psi.evaluate(s)

    direct = product_apply(product, generator, vector, spec)

    inner_g = hp_apply(g, generator, vector, spec, oracle=False)
    outer_psi = bp_apply(psi, generator, inner_g.value, spec, oracle=False)
    psi_of_g = attach_oracle(_combine(outer_psi, inner_g, "psi_of_g"), generator, h, vector)

    inner_psi = bp_apply(psi, generator, vector, spec, oracle=False)
    outer_g = hp_apply(g, generator, inner_psi.value, spec, oracle=False)
    g_of_psi = attach_oracle(_combine(outer_g, inner_psi, "g_of_psi"), generator, h, vector)

    logger.debug(
        "Product %s*%s: |direct - psi_of_g| = %.3e.",
        g.label,
        psi.label,
        _norm(direct.value - psi_of_g.value),
    )
    return {"h_direct": direct, "psi_of_g": psi_of_g, "g_of_psi": g_of_psi}


# ---------------------------------------------------------------------------
# reciprocal and log-inverse

RECIPROCALS: dict[str, Callable[[], LaplaceSymbol]] = {
    "log_shift": build_recip_log,
}


def reciprocal_bernstein_inverse(
    psi: BernsteinSymbol,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
) -> ApplyResult:
    """``psi(A)^{-1} x = (1/psi)(A) x``; the round-trip residual is recorded."""

    builder = RECIPROCALS.get(psi.name)
    if builder is None:
        raise RuleHypothesisError(f"No registered reciprocal symbol for {psi.label}.")
    generator = as_generator(A)
    _require_stable(generator, "The reciprocal rule")
    vector = as_vector(generator, x)

    result = hp_apply(builder(), generator, vector, spec).with_route(f"reciprocal:{psi.label}")
    check = bp_apply(psi, generator, result.value, spec, oracle=False)
    residual = _norm(check.value - vector)
    logger.debug("Reciprocal of %s: round-trip residual %.3e.", psi.label, residual)
    return result.with_note("round trip psi(A) y - x", round_trip_residual=residual)


def _lorentz_tail(tau: float) -> float:
    # int_tau^inf e^{-s} / (pi^2 + s^2) ds <= e^{-tau} / (pi^2 + tau^2)
    return math.exp(-tau) / (math.pi**2 + tau**2)


def _log_inverse_resolvent(A: Generator, x: np.ndarray, spec: QuadratureSpec) -> ApplyResult:
    """Resolvent form ``(-A)^{-1}x + int_1^inf R(t, A)x dt / (pi^2 + log^2(t - 1))``.

    With ``t = 1 + e^tau``; the ``x/2`` part of the right half is split off analytically.
    """

    shifted = A.entries @ x - x
    x_norm, shifted_norm = _norm(x), _norm(shifted)
    target = spec.target(x_norm)
    resolvent_factor = A.growth_M / (1.0 - A.growth_omega)

    tau = 1.0
    while True:
        left = resolvent_factor * x_norm * _lorentz_tail(tau)
        right = A.growth_M * shifted_norm * _lorentz_tail(tau)
        if left + right <= target or tau >= MAX_TAU:
            break
        tau *= 2.0

    def left_phi(taus: np.ndarray) -> np.ndarray:
        return resolvent_orbit(A, 1.0 + np.exp(taus), x)

    def right_phi(taus: np.ndarray) -> np.ndarray:
        return resolvent_orbit(A, 1.0 + np.exp(taus), shifted)

    left_part = integrate_interval(
        left_phi,
        -tau,
        0.0,
        spec,
        weight=lambda taus: np.exp(taus) / (math.pi**2 + taus**2),
        reference_norm=x_norm,
    )
    right_part = integrate_interval(
        right_phi,
        0.0,
        tau,
        spec,
        weight=lambda taus: 1.0 / (math.pi**2 + taus**2),
        reference_norm=x_norm,
    )
    value = resolvent_solve(A, 0.0, x) + left_part.value + 0.5 * x + right_part.value
    bound = left + right
    return ApplyResult.converged(
        value,
        error_estimate=left_part.error_estimate + right_part.error_estimate + bound,
        T_star=tau,
        panels_used=left_part.panels_used + right_part.panels_used,
        tolerance=left_part.tolerance + right_part.tolerance + max(bound, target),
        route="log_inverse:resolvent",
        diagnostics={"tail_bound": bound},
    )


def log_inverse(
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    route: str = "volterra",
) -> ApplyResult:
    """``(log(I - A))^{-1} x`` by the Volterra-function integral or the resolvent integral."""

    if route not in LOG_ROUTES:
        raise ValueError(f"Unknown log-inverse route {route!r}; expected one of {LOG_ROUTES}.")
    spec = spec or QuadratureSpec.from_settings()
    generator = as_generator(A)
    _require_stable(generator, "The log-inverse")
    vector = as_vector(generator, x)

    if route == "volterra":
        # e^{-t} nu(t, -1) = (d/dt + 1)(e^{-t} nu(t, 0)) and e^{-t} nu(t, 0) vanishes at 0,
        # so int T(t)x e^{-t} nu(t, -1) dt = (I - A) int T(t)x e^{-t} nu(t, 0) dt
        result = hp_apply(build_log_inverse(), generator, vector, spec, oracle=False).with_route("log_inverse:volterra")
    else:
        result = _log_inverse_resolvent(generator, vector, spec)

    norm_bound = generator.growth_M * _norm(vector) / math.log(1.0 - generator.growth_omega)
    result = result.with_note("M||x||/log(1 - omega)", norm_bound=norm_bound)
    return attach_oracle(result, generator, lambda s: 1.0 / np.emath.log(1.0 - s), vector)


# ---------------------------------------------------------------------------
# composition


def _composite_stable_half_measure(h: LaplaceSymbol) -> MeasureRepr:
    """``m(v) = int nu_u(v) a'(u) du`` for the 1/2-stable subordinator and a power-law density."""

    measure = h.measure
    envelope = measure.envelope
    if envelope is None or envelope.rate != 0.0 or envelope.power != measure.p0:
        raise CompositionRouteUnavailable(f"Composite density needs a pure power-law density; {h.label} is not one.")
    p0 = measure.p0
    exponent = 0.5 * (p0 - 1.0)
    coefficient = envelope.coefficient * 2.0**p0 * gamma(0.5 * (p0 + 2.0)) / math.sqrt(math.pi)

    def single(v: float) -> float:
        scale = 2.0 * math.sqrt(v)

        # u = 2 sqrt(v) w turns nu_u(v) du into (2/sqrt(pi v)) w e^{-w^2} dw
        def core(w: float) -> float:
            point = max(w, _TINY)
            density = float(measure.evaluate_density(np.array([scale * point]))[0])
            return point * math.exp(-point * point) * density * point ** (-p0)

        value = quad(core, 0.0, 10.0, weight="alg", wvar=(p0, 0.0), limit=200, epsabs=0.0, epsrel=1e-12)[0]
        return 2.0 * value / math.sqrt(math.pi * v)

    def density(v: np.ndarray) -> np.ndarray:
        points = np.atleast_1d(np.asarray(v, dtype=float))
        return np.array([single(float(point)) for point in points])

    return MeasureRepr(
        density=density,
        p0=exponent,
        envelope=TailEnvelope(coefficient, exponent, 0.0),
        label=f"composite of {h.label} with stable-1/2",
    )


def compose_apply(
    h: LaplaceSymbol,
    psi: BernsteinSymbol,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
) -> dict[str, ApplyResult]:
    """``(h o psi)(A)x`` directly and as ``h(psi(A))x``."""

    spec = spec or QuadratureSpec.from_settings()
    if h.measure.sign_info != "positive":
        raise RuleHypothesisError(f"The composition rule needs a positive measure; {h.label} is {h.measure.sign_info}.")
    if h.has_prefactor:
        raise RuleHypothesisError(f"The composition rule needs h = La directly; {h.label} carries a polynomial prefactor.")
    generator = as_generator(A)
    _require_stable(generator, "The composition rule")
    vector = as_vector(generator, x)

    def composite(s):
        return h.evaluate(psi.evaluate(s))

    if psi.name == "identity":
        nested = hp_apply(h, generator, vector, spec).with_route("nested")
    else:
        matrix, psi_error = materialize_bernstein(psi, generator, spec)
        inner = make_generator(matrix)
        nested = hp_apply(h, inner, vector, spec, oracle=False).with_route("nested")
        nested = attach_oracle(nested, generator, composite, vector).with_note(
            "psi(A) materialised", psi_error=psi_error
        )

    if psi.name == "identity":
        outer = hp_apply(h, generator, vector, spec).with_route("outer_direct")
    elif is_stable_half(psi):
        symbol = LaplaceSymbol(
            name="composite",
            measure=_composite_stable_half_measure(h),
            evaluate=composite,
        )
        outer = hp_apply(symbol, generator, vector, spec).with_route("outer_direct")
    else:
        try:
            reference = oracle_apply(generator, composite, vector)
        except (OracleUnavailableError, OracleDomainError) as exc:
            raise CompositionRouteUnavailable(
                f"No composite density for {psi.label} and the spectral oracle is unavailable: {exc}"
            ) from exc
        logger.warning("Composition with %s falls back to the spectral oracle.", psi.label)
        outer = ApplyResult.converged(
            reference,
            error_estimate=0.0,
            route="outer_direct:oracle",
            notes=("outer route evaluated by the spectral oracle only",),
        ).with_oracle(0.0)
    return {"outer_direct": outer, "nested": nested}
