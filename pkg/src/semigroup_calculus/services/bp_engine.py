"""Bochner-Phillips calculus for negative Bernstein functions and subordination."""

from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np
from scipy.linalg import expm

from semigroup_calculus.config.settings import get_settings
from semigroup_calculus.models import ApplyResult, BernsteinSymbol, Generator, QuadratureSpec
from semigroup_calculus.services.hp_engine import attach_oracle, hp_apply, non_convergent_result
from semigroup_calculus.services.linalg_core import (
    as_generator,
    as_vector,
    expm_action,
    phi1_orbit,
    semigroup_orbit,
    time_scale,
)
from semigroup_calculus.services.quadrature import (
    DivergentIntegralError,
    DivergentTailError,
    choose_truncation,
    integrate_density,
    require_finite,
    tail_bound_for,
)
from semigroup_calculus.services.symbols import (
    BernsteinHypothesisError,
    SubordinationUnavailableError,
    SymbolParameterError,
    levy_tail,
    psi_tilde_density,
    subordination_density,
)

logger = logging.getLogger(__name__)

ROUTES = ("direct", "subordination")
MAX_LEVY_TRUNCATION = 1e12

__all__ = [
    "BernsteinHypothesisError",
    "SubordinationUnavailableError",
    "bp_apply",
    "materialize_bernstein",
    "psi_tilde_apply",
    "subordinated_apply",
]


def _norm(value: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(value)))


def _atom_part(A: Generator, atoms, x: np.ndarray, Ax: np.ndarray) -> np.ndarray:
    total = np.zeros_like(Ax)
    for loc, weight in atoms:
        if loc == 0.0:
            total = total + weight * Ax
        else:
            total = total + weight * (expm_action(A, loc, x) - x) / loc
    return total


def _levy_integral(
    A: Generator,
    psi: BernsteinSymbol,
    x: np.ndarray,
    Ax: np.ndarray,
    spec: QuadratureSpec,
) -> tuple[np.ndarray, float, float, int, float]:
    """``int (T(u) - I)x u^{-1} drho(u)`` over the density of rho.

    Returns the value, the error estimate, the tolerance, the panel count and T*.
    """

    levy = psi.levy
    reference = _norm(x)
    split = get_settings().levy_split
    end = levy.support_end
    near_upper = split if end is None else min(split, end)

    # (T(u) - I)x / u = phi_1(uA) Ax on the near part
    near = integrate_density(
        lambda us: phi1_orbit(A, us, Ax),
        levy,
        0.0,
        near_upper,
        spec,
        reference_norm=reference,
        time_scale=time_scale(A),
    )
    value, error, tolerance, panels = near.value, near.quadrature_error, near.tolerance, near.panels_used
    T_star = near_upper
    if end is not None and end <= split:
        return value, error, tolerance, panels, T_star

    shape = (-1,) + (1,) * x.ndim

    if end is not None:
        far = integrate_density(
            lambda us: (semigroup_orbit(A, us, x) - x[None, ...]) / np.asarray(us, dtype=float).reshape(shape),
            levy,
            split,
            end,
            spec,
            reference_norm=reference,
        )
        value = value + far.value
        error += far.quadrature_error
        tolerance += far.tolerance
        return value, error, tolerance, panels + far.panels_used, end

    if levy.envelope is None:
        raise DivergentTailError("Levy measure declares no behaviour at infinity.")
    # -x int_split^inf u^{-1} drho(u) is exact; only the T(u)x part is truncated
    value = value - levy_tail(psi, split) * x
    weighted = replace(levy, envelope=levy.envelope.shifted_power(-1.0))
    tail = choose_truncation(
        lambda T: tail_bound_for(A, weighted, T, scale=reference).bound,
        spec.target(reference),
        start=max(1.0, 2.0 * split),
    )
    if tail.T_star > MAX_LEVY_TRUNCATION:
        raise DivergentTailError(
            f"Levy tail of {psi.label} needs T*={tail.T_star:.3e} beyond {MAX_LEVY_TRUNCATION:.0e}.",
            power=weighted.envelope.power,
            rate=weighted.envelope.rate,
        )

    far = integrate_density(
        lambda us: semigroup_orbit(A, us, x) / np.asarray(us, dtype=float).reshape(shape),
        levy,
        split,
        tail.T_star,
        spec,
        reference_norm=reference,
    )
    value = value + far.value
    error += far.quadrature_error + tail.bound
    tolerance += far.tolerance + max(tail.bound, spec.target(reference))
    return value, error, tolerance, panels + far.panels_used, tail.T_star


def bp_apply(
    psi: BernsteinSymbol,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    best_effort: bool = False,
    oracle: bool = True,
) -> ApplyResult:
    """``psi(A)x = c0 x + int (T(u) - I)x u^{-1} drho(u)``."""

    spec = spec or QuadratureSpec.from_settings()
    generator = as_generator(A)
    vector = as_vector(generator, x)
    Ax = generator.entries @ vector
    route = f"bochner_phillips:{psi.label}"

    value = psi.c0 * vector + _atom_part(generator, psi.levy.atoms, vector, Ax)
    error, tolerance, panels, T_star = 0.0, spec.target(_norm(vector)), 0, 0.0
    if psi.levy.density is not None:
        try:
            integral, error, tolerance, panels, T_star = _levy_integral(generator, psi, vector, Ax, spec)
            require_finite(integral, error, panels_used=panels, T_star=T_star)
        except DivergentIntegralError as exc:
            if not best_effort:
                raise
            return non_convergent_result(exc, route)
        value = value + integral

    logger.debug("%s: T*=%g, %d panels, error %.3e.", route, T_star, panels, error)
    result = ApplyResult.converged(
        value,
        error_estimate=error,
        T_star=T_star,
        panels_used=panels,
        tolerance=tolerance,
        route=route,
    )
    return attach_oracle(result, generator, psi.evaluate, vector) if oracle else result


def psi_tilde_apply(
    psi: BernsteinSymbol,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    best_effort: bool = False,
) -> ApplyResult:
    """``psi~(A)x = int T(t)x f(t) dt`` with ``f(r) = int_r^inf u^{-1} drho(u)``."""

    symbol = psi_tilde_density(psi)
    return hp_apply(symbol, A, x, spec, best_effort=best_effort).with_route(f"psi_tilde:{psi.label}")


def materialize_bernstein(
    psi: BernsteinSymbol,
    A: Generator | np.ndarray,
    spec: QuadratureSpec | None = None,
) -> tuple[np.ndarray, float]:
    """The matrix ``psi(A)``, built column by column, and its quadrature error estimate."""

    generator = as_generator(A)
    identity = np.eye(generator.dim, dtype=generator.entries.dtype)
    result = bp_apply(psi, generator, identity, spec, oracle=False)
    return np.asarray(result.value), result.error_estimate


def subordinated_apply(
    psi: BernsteinSymbol,
    t: float,
    A: Generator | np.ndarray,
    x: np.ndarray,
    spec: QuadratureSpec | None = None,
    *,
    route: str = "direct",
) -> ApplyResult:
    """``g_t(A)x = e^{t psi(A)} x``.

    ``route="direct"`` exponentiates the materialised ``psi(A)``;
    ``route="subordination"`` integrates ``T(v)x`` against the registered
    density ``nu_t``.
    """

    if route not in ROUTES:
        raise ValueError(f"Unknown subordination route {route!r}; expected one of {ROUTES}.")
    if t < 0:
        raise SymbolParameterError(f"Subordination time must be nonnegative, got {t}.", name="exp_tpsi")
    generator = as_generator(A)
    vector = as_vector(generator, x)
    label = f"subordinated:{route}:t={t:g}"

    def symbol_of(s):
        return np.exp(t * psi.evaluate(s))

    if t == 0:
        result = ApplyResult.converged(vector.copy(), error_estimate=0.0, route=label)
        return attach_oracle(result, generator, symbol_of, vector)

    if route == "subordination":
        symbol = subordination_density(psi, t, spec)
        return hp_apply(symbol, generator, vector, spec).with_route(label)

    matrix, psi_error = materialize_bernstein(psi, generator, spec)
    propagator = expm(t * matrix)
    value = propagator @ vector
    # first-order perturbation of the exponential in the materialised matrix
    error = t * psi_error * max(1.0, float(np.linalg.norm(propagator, 2))) * _norm(vector)
    result = ApplyResult.converged(
        value,
        error_estimate=error,
        tolerance=max(error, (spec or QuadratureSpec.from_settings()).target(_norm(vector))),
        route=label,
        notes=("error estimate propagated from psi(A) to first order",),
    )
    logger.debug("%s: materialised psi(A) with error %.3e.", label, psi_error)
    return attach_oracle(result, generator, symbol_of, vector)
