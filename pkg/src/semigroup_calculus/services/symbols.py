from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import quad
from scipy.special import digamma, erfc, exp1, gamma, gammainc, gammaln, roots_legendre

from semigroup_calculus.models import (
    BernsteinSymbol,
    LaplaceSymbol,
    MeasureRepr,
    QuadratureSpec,
    SymbolCatalogEntry,
    TailBound,
    TailEnvelope,
)
from semigroup_calculus.services.quadrature import (
    DivergentIntegralError,
    choose_truncation,
    integrate_vector,
    profile_tail_bound,
)
from semigroup_calculus.utils.parsing import SymbolSpec

logger = logging.getLogger(__name__)

SYMBOL_TOLERANCE = 1e-8
DEFAULT_SAMPLES = (-0.1, -1.0, -10.0)


class UnknownSymbolError(ValueError):
    pass


class SymbolParameterError(ValueError):
    def __init__(self, message: str, *, name: str | None = None) -> None:
        super().__init__(message)
        self.name = name


class MeasureValidationError(ValueError):
    pass


class DivergentTransformError(DivergentIntegralError):
    pass


class BernsteinHypothesisError(ValueError):
    """psi does not satisfy psi(0) = 0 where a factorisation needs it."""


class SubordinationUnavailableError(LookupError):
    pass


# ---------------------------------------------------------------------------
# Volterra functions nu(t, alpha)

_VOLTERRA_PANELS = 64
_VOLTERRA_NODES, _VOLTERRA_WEIGHTS = roots_legendre(16)
_VOLTERRA_SCAN = 2001
_VOLTERRA_WINDOW = 60.0
_VOLTERRA_TAIL = 1e-12


def _volterra_log_integrand(xi: np.ndarray, log_t: float, alpha: float) -> np.ndarray:
    # t^{xi + alpha} / Gamma(xi + alpha + 1)
    with np.errstate(divide="ignore"):
        return (xi + alpha) * log_t - gammaln(xi + alpha + 1.0)


@lru_cache(maxsize=65536)
def _log_volterra(t: float, alpha: float) -> float:
    log_t = math.log(t)
    upper = max(50.0, 10.0 * t)
    for _ in range(12):
        coarse = np.linspace(0.0, upper, _VOLTERRA_SCAN)
        profile = _volterra_log_integrand(coarse, log_t, alpha)
        peak = float(np.max(profile))
        keep = np.nonzero(profile >= peak - _VOLTERRA_WINDOW)[0]
        step = coarse[1] - coarse[0]
        lower_edge = max(0.0, coarse[keep[0]] - step)
        upper_edge = min(upper, coarse[keep[-1]] + step)

        edges = np.linspace(lower_edge, upper_edge, _VOLTERRA_PANELS + 1)
        half = 0.5 * np.diff(edges)
        middle = 0.5 * (edges[:-1] + edges[1:])
        nodes = middle[:, None] + half[:, None] * _VOLTERRA_NODES[None, :]
        weights = half[:, None] * _VOLTERRA_WEIGHTS[None, :]
        head = float(np.sum(weights * np.exp(_volterra_log_integrand(nodes, log_t, alpha) - peak)))

        # concave log-integrand, decreasing past its peak: tail <= e^{phi(X)} / |phi'(X)|
        slope = log_t - float(digamma(upper + alpha + 1.0))
        tail = math.exp(float(_volterra_log_integrand(np.array(upper), log_t, alpha)) - peak) / abs(slope)
        if slope < 0 and tail <= _VOLTERRA_TAIL * head:
            return peak + math.log(head)
        upper *= 2.0
    raise ArithmeticError(f"Volterra function tail at t={t} could not be certified.")


def log_volterra_nu(t: float | np.ndarray, alpha: float = -1.0) -> np.ndarray:
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times <= 0) or not np.all(np.isfinite(times)):
        raise ValueError("Volterra functions are evaluated at t > 0.")
    if alpha < -1.0:
        raise ValueError(f"Volterra functions are evaluated for alpha >= -1, got {alpha}.")
    values = np.array([_log_volterra(float(moment), float(alpha)) for moment in times])
    return values if np.ndim(t) else values[0]


def volterra_nu(t: float | np.ndarray, alpha: float = -1.0) -> np.ndarray:
    """``nu(t, alpha) = int_0^inf t^{xi+alpha} / Gamma(xi+alpha+1) dxi``.

    Its Laplace transform is ``1 / (p^{alpha+1} log p)`` for ``p > 1``.
    ``nu(., -1)`` behaves like ``1/(t log^2 t)`` at 0 and ``nu(., 0)`` is its
    distribution function.
    """

    return np.exp(log_volterra_nu(t, alpha))


def _volterra_kernel(t: np.ndarray) -> np.ndarray:
    """``e^{-t} nu(t, 0)``: below 1, vanishing like ``1/log(1/t)`` at 0."""

    times = np.asarray(t, dtype=float)
    return np.exp(log_volterra_nu(times, 0.0) - times)


def _volterra_kernel_measure() -> MeasureRepr:
    # Laplace transform 1 / ((1 - s) log(1 - s))
    return MeasureRepr(
        density=_volterra_kernel,
        p0=0.0,
        envelope=TailEnvelope(1.0, 0.0, 0.0),
        label="e^-t nu(t,0)",
    )



# ---------------------------------------------------------------------------
# catalog builders


def _require(condition: bool, message: str, name: str) -> None:
    if not condition:
        raise SymbolParameterError(message, name=name)


def _ones(t: np.ndarray) -> np.ndarray:
    return np.ones_like(np.asarray(t, dtype=float))


def build_inverse() -> LaplaceSymbol:
    measure = MeasureRepr(
        density=lambda t: -_ones(t),
        p0=0.0,
        envelope=TailEnvelope(1.0, 0.0, 0.0),
        sign_info="signed",
        distribution_fn=lambda t: -np.asarray(t, dtype=float),
        distribution_envelope=TailEnvelope(1.0, 1.0, 0.0),
        label="-Lebesgue",
    )
    return LaplaceSymbol(name="inverse", measure=measure, evaluate=lambda s: 1.0 / np.asarray(s))


def build_frac_power(alpha: float) -> LaplaceSymbol:
    _require(alpha > 0, f"frac_power needs alpha > 0, got {alpha}.", "frac_power")
    log_norm = float(gammaln(alpha))

    def density(t: np.ndarray) -> np.ndarray:
        times = np.asarray(t, dtype=float)
        return np.exp((alpha - 1.0) * np.log(times) - log_norm)

    measure = MeasureRepr(
        density=density,
        p0=alpha - 1.0,
        envelope=TailEnvelope(1.0 / gamma(alpha), alpha - 1.0, 0.0),
        distribution_fn=lambda t: np.power(np.asarray(t, dtype=float), alpha) / gamma(alpha + 1.0),
        distribution_envelope=TailEnvelope(1.0 / gamma(alpha + 1.0), alpha, 0.0),
        label=f"t^{alpha - 1:g}/Gamma({alpha:g})",
    )
    return LaplaceSymbol(
        name="frac_power",
        measure=measure,
        evaluate=lambda s: np.emath.power(-np.asarray(s), -alpha),
        parameters={"alpha": float(alpha)},
    )


def build_neg_frac_power_bernstein(beta: float) -> BernsteinSymbol:
    _require(0 < beta < 1, f"neg_frac_power_bernstein needs 0 < beta < 1, got {beta}.", "neg_frac_power_bernstein")
    constant = beta / gamma(1.0 - beta)
    tail_constant = 1.0 / gamma(1.0 - beta)

    levy = MeasureRepr(
        density=lambda u: constant * np.power(np.asarray(u, dtype=float), -beta),
        p0=-beta,
        envelope=TailEnvelope(constant, -beta, 0.0),
        label=f"rho(u)={constant:.6g} u^-{beta:g}",
    )
    return BernsteinSymbol(
        name="neg_frac_power_bernstein",
        c0=0.0,
        levy=levy,
        evaluate=lambda s: -np.emath.power(-np.asarray(s), beta),
        parameters={"beta": float(beta)},
        tail_density=lambda r: tail_constant * np.power(np.asarray(r, dtype=float), -beta),
        tail_p0=-beta,
        tail_envelope=TailEnvelope(tail_constant, -beta, 0.0),
    )


def build_log_shift() -> BernsteinSymbol:
    levy = MeasureRepr(
        density=lambda u: np.exp(-np.asarray(u, dtype=float)),
        p0=0.0,
        envelope=TailEnvelope(1.0, 0.0, 1.0),
        label="rho(u)=e^-u",
    )
    return BernsteinSymbol(
        name="log_shift",
        c0=0.0,
        levy=levy,
        evaluate=lambda s: -np.emath.log(1.0 - np.asarray(s)),
        tail_density=lambda r: exp1(np.asarray(r, dtype=float)),
        tail_p0=-0.5,
        tail_envelope=TailEnvelope(1.0, -1.0, 1.0),
    )


def build_recip_log() -> LaplaceSymbol:
    """``-1/log(1 - s) = (s - 1) k(s)`` with ``k`` the transform of ``e^{-t} nu(t, 0)``."""

    return LaplaceSymbol(
        name="recip_log",
        measure=_volterra_kernel_measure(),
        evaluate=lambda s: -1.0 / np.emath.log(1.0 - np.asarray(s)),
        prefactor=(-1.0, 1.0),
    )


def build_log_inverse() -> LaplaceSymbol:
    """``s -> 1/log(1 - s)``, the symbol of ``(log(I - A))^{-1}``; ``(1 - s) k(s)``."""

    return LaplaceSymbol(
        name="log_inverse",
        measure=_volterra_kernel_measure(),
        evaluate=lambda s: 1.0 / np.emath.log(1.0 - np.asarray(s)),
        prefactor=(1.0, -1.0),
    )


def build_identity() -> BernsteinSymbol:
    return BernsteinSymbol(
        name="identity",
        c0=0.0,
        levy=MeasureRepr(atoms=((0.0, 1.0),), label="delta_0"),
        evaluate=lambda s: np.asarray(s) * 1.0,
    )


def build_shift(t0: float) -> LaplaceSymbol:
    _require(t0 >= 0, f"shift needs t0 >= 0, got {t0}.", "shift")
    return LaplaceSymbol(
        name="shift",
        measure=MeasureRepr(atoms=((float(t0), 1.0),), label=f"delta_{t0:g}"),
        evaluate=lambda s: np.exp(np.asarray(s) * t0),
        parameters={"t0": float(t0)},
    )


# ---------------------------------------------------------------------------
# subordination densities nu_t with Laplace transform e^{t psi}


def _stable_half_measure(t: float) -> MeasureRepr:
    coefficient = t / (2.0 * math.sqrt(math.pi))

    def density(v: np.ndarray) -> np.ndarray:
        values = np.asarray(v, dtype=float)
        return coefficient * np.exp(-(t * t) / (4.0 * values) - 1.5 * np.log(values))

    return MeasureRepr(
        density=density,
        p0=0.0,
        envelope=TailEnvelope(coefficient, -1.5, 0.0),
        distribution_fn=lambda v: erfc(t / (2.0 * np.sqrt(np.asarray(v, dtype=float)))),
        distribution_envelope=TailEnvelope(1.0, 0.0, 0.0),
        label=f"stable-1/2 nu_{t:g}",
    )


def _gamma_measure(t: float) -> MeasureRepr:
    log_norm = float(gammaln(t))

    def density(v: np.ndarray) -> np.ndarray:
        values = np.asarray(v, dtype=float)
        return np.exp((t - 1.0) * np.log(values) - values - log_norm)

    return MeasureRepr(
        density=density,
        p0=t - 1.0,
        envelope=TailEnvelope(math.exp(-log_norm), t - 1.0, 1.0),
        distribution_fn=lambda v: gammainc(t, np.asarray(v, dtype=float)),
        distribution_envelope=TailEnvelope(1.0, 0.0, 0.0),
        label=f"gamma nu_{t:g}",
    )


def is_stable_half(psi: BernsteinSymbol) -> bool:
    return psi.name == "neg_frac_power_bernstein" and abs(psi.parameters.get("beta", 0.0) - 0.5) < 1e-14


def has_subordination_density(psi: BernsteinSymbol) -> bool:
    return is_stable_half(psi) or psi.name in {"log_shift", "identity"}


def subordination_measure(psi: BernsteinSymbol, t: float) -> MeasureRepr:
    """Registered ``nu_t`` for ``psi``; a subprobability measure on ``[0, inf)``."""

    if t < 0:
        raise SymbolParameterError(f"Subordination time must be nonnegative, got {t}.", name="exp_tpsi")
    if t == 0:
        return MeasureRepr(atoms=((0.0, 1.0),), label="nu_0")

    if is_stable_half(psi):
        measure = _stable_half_measure(t)
    elif psi.name == "log_shift":
        measure = _gamma_measure(t)
    elif psi.name == "identity":
        measure = MeasureRepr(atoms=((float(t), 1.0),), label=f"delta_{t:g}")
    else:
        raise SubordinationUnavailableError(f"No closed-form subordination density is registered for {psi.label}.")

    if psi.c0 != 0.0:
        factor = math.exp(t * psi.c0)
        base = measure
        measure = MeasureRepr(
            atoms=tuple((loc, factor * weight) for loc, weight in base.atoms),
            density=None if base.density is None else (lambda v: factor * base.density(v)),
            p0=base.p0,
            envelope=None if base.envelope is None else base.envelope.scaled(factor),
            label=f"{factor:.6g}*{base.label}",
        )
    return measure


def build_exp_tpsi(t: float, psi: BernsteinSymbol) -> LaplaceSymbol:
    _require(t >= 0, f"exp_tpsi needs t >= 0, got {t}.", "exp_tpsi")
    if not isinstance(psi, BernsteinSymbol):
        raise SymbolParameterError("exp_tpsi needs a Bernstein symbol as its second argument.", name="exp_tpsi")
    measure = subordination_measure(psi, t)
    return LaplaceSymbol(
        name="exp_tpsi",
        measure=measure,
        evaluate=lambda s: np.exp(t * psi.evaluate(s)),
        parameters={"t": float(t)},
        inner=psi,
    )


CATALOG: dict[str, SymbolCatalogEntry] = {
    entry.name: entry
    for entry in (
        SymbolCatalogEntry("inverse", "laplace", (), "-", "Example 1: g(s) = 1/s, g(A) = A^-1", build_inverse),
        SymbolCatalogEntry(
            "frac_power", "laplace", ("alpha",), "alpha > 0", "Example 2: g(s) = (-s)^-alpha", build_frac_power
        ),
        SymbolCatalogEntry(
            "neg_frac_power_bernstein",
            "bernstein",
            ("beta",),
            "0 < beta < 1",
            "Example 3: psi(s) = -(-s)^beta",
            build_neg_frac_power_bernstein,
        ),
        SymbolCatalogEntry("log_shift", "bernstein", (), "-", "Example 4: psi(s) = -log(1 - s)", build_log_shift),
        SymbolCatalogEntry(
            "recip_log", "laplace", (), "-", "Example 4: 1/psi(s) = -1/log(1 - s)", build_recip_log
        ),
        SymbolCatalogEntry(
            "exp_tpsi",
            "laplace",
            ("t", "psi"),
            "t >= 0; psi with a registered nu_t",
            "Definition 2: g_t(s) = e^{t psi(s)}",
            build_exp_tpsi,
        ),
        SymbolCatalogEntry(
            "identity", "bernstein", (), "-", "Corollary 8: psi(s) = s (Dirac measure at 0)", build_identity
        ),
        SymbolCatalogEntry("shift", "laplace", ("t0",), "t0 >= 0", "unit atom at t0: g(s) = e^{s t0}", build_shift),
    )
}


def catalog_build(name: str, *params):
    entry = CATALOG.get(name)
    if entry is None:
        raise UnknownSymbolError(f"Unknown symbol {name!r}. Known symbols: {', '.join(CATALOG)}.")
    if len(params) != len(entry.parameters):
        raise SymbolParameterError(
            f"{name} expects {len(entry.parameters)} parameter(s) ({', '.join(entry.parameters) or 'none'}), got {len(params)}.",
            name=name,
        )
    return entry.build(*params)


def build_from_spec(spec: SymbolSpec) -> LaplaceSymbol | BernsteinSymbol:
    if spec.inner is not None:
        inner = build_from_spec(spec.inner)
        if not isinstance(inner, BernsteinSymbol):
            raise SymbolParameterError(f"{spec.name} needs a Bernstein inner symbol, got {inner.label}.", name=spec.name)
        return catalog_build(spec.name, *spec.params, inner)
    return catalog_build(spec.name, *spec.params)


# ---------------------------------------------------------------------------
# psi-tilde


def _numeric_tail(levy: MeasureRepr) -> Callable[[np.ndarray], np.ndarray]:
    @lru_cache(maxsize=8192)
    def single(r: float) -> float:
        value, _ = quad(lambda u: float(levy.evaluate_density(np.array([u]))[0]) / u, r, np.inf, limit=400)
        return value

    def tail(r: np.ndarray) -> np.ndarray:
        points = np.atleast_1d(np.asarray(r, dtype=float))
        return np.array([single(float(point)) for point in points])

    return tail


def _derived_tail_data(levy: MeasureRepr) -> tuple[float, TailEnvelope]:
    p0 = levy.p0 if levy.p0 < 0 else (-0.5 if levy.p0 == 0 else 0.0)
    envelope = levy.envelope
    if envelope is None:
        raise MeasureValidationError("Levy measure declares no behaviour at infinity.")
    if envelope.rate > 0 and envelope.power <= 1.0:
        return p0, TailEnvelope(envelope.coefficient / envelope.rate, envelope.power - 1.0, envelope.rate)
    if envelope.rate == 0 and envelope.power < 0:
        return p0, TailEnvelope(envelope.coefficient / -envelope.power, envelope.power, 0.0)
    raise MeasureValidationError("Cannot derive a tail envelope for this Levy measure.")


def levy_tail(psi: BernsteinSymbol, r: float) -> float:
    """``int_r^inf u^{-1} drho(u)`` over the density of rho, closed form when the symbol carries one."""

    if psi.tail_density is not None:
        return float(np.asarray(psi.tail_density(np.array([r])))[0])
    levy = psi.levy
    return quad(lambda u: float(levy.evaluate_density(np.array([u]))[0]) / u, r, np.inf, limit=400)[0]


def psi_tilde_density(psi: BernsteinSymbol) -> LaplaceSymbol:
    """Laplace symbol of ``psi(s)/s`` with density ``f(r) = int_r^inf u^{-1} drho(u)``."""

    if psi.c0 != 0.0:
        raise BernsteinHypothesisError(f"psi-tilde needs psi(0) = 0, got c0 = {psi.c0}.")

    levy = psi.levy
    atoms = tuple((0.0, weight) for loc, weight in levy.atoms if loc == 0.0)
    boxes = tuple((loc, weight) for loc, weight in levy.atoms if loc > 0.0)

    continuous: Callable[[np.ndarray], np.ndarray] | None = None
    p0, envelope = 0.0, None
    if levy.density is not None:
        if psi.tail_density is not None:
            continuous = psi.tail_density
            p0, envelope = psi.tail_p0, psi.tail_envelope
        else:
            continuous = _numeric_tail(levy)
            p0, envelope = _derived_tail_data(levy)

    density = None
    support_end = None
    if continuous is not None or boxes:

        def density(r: np.ndarray) -> np.ndarray:
            points = np.asarray(r, dtype=float)
            total = continuous(points) if continuous is not None else np.zeros_like(points)
            for loc, weight in boxes:
                total = total + np.where(points <= loc, weight / loc, 0.0)
            return total

        if continuous is None:
            support_end = max(loc for loc, _ in boxes)
        p0 = min(p0, 0.0)

    measure = MeasureRepr(
        atoms=atoms,
        density=density,
        p0=p0,
        envelope=envelope,
        support_end=support_end,
        label=f"f for {psi.label}",
    )

    def evaluate(s):
        values = np.asarray(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return psi.evaluate(values) / values

    return LaplaceSymbol(
        name="psi_tilde",
        measure=measure,
        evaluate=evaluate,
        inner=psi,
    )


# ---------------------------------------------------------------------------
# measure-side evaluation and certificates


def _check_transform_data(measure: MeasureRepr) -> None:
    if measure.density is None:
        return
    if measure.p0 <= -1.0:
        raise DivergentTransformError(f"Density exponent {measure.p0:g} at 0 makes the transform diverge.")
    if measure.envelope is None and measure.support_end is None:
        raise DivergentTransformError("Density declares no behaviour at infinity.")


def symbol_eval_via_measure(sym: LaplaceSymbol, s: float, spec: QuadratureSpec | None = None) -> complex | float:
    """Quadrature of ``int e^{st} da(t)`` including the atom contributions."""

    if not s < 0:
        raise ValueError(f"Symbols are evaluated on s < 0, got {s}.")
    spec = spec or QuadratureSpec.from_settings()
    measure = sym.measure
    _check_transform_data(measure)

    def phi(t: np.ndarray) -> np.ndarray:
        return np.exp(s * np.asarray(t, dtype=float))

    if measure.density is None or measure.support_end is not None:
        tail = TailBound(T_star=measure.support_end or 1.0, bound=0.0)
    else:
        envelope = measure.envelope
        tail = choose_truncation(lambda T: profile_tail_bound(1.0, s, envelope, T), spec.target(1.0))

    outcome = integrate_vector(phi, measure, spec, tail, reference_norm=0.0, time_scale=1.0 / (1.0 + abs(s)))
    c, d = sym.prefactor
    value = (c + d * s) * complex(np.asarray(outcome.value))
    return value.real if value.imag == 0.0 else value


def bernstein_eval_via_measure(psi: BernsteinSymbol, s: float, spec: QuadratureSpec | None = None) -> float:
    """``c0 + int (e^{su} - 1) u^{-1} drho(u)`` by quadrature."""

    if not s <= 0:
        raise ValueError(f"Bernstein symbols are evaluated on s <= 0, got {s}.")
    spec = spec or QuadratureSpec.from_settings()
    total = psi.c0
    for loc, weight in psi.levy.atoms:
        total += weight * (s if loc == 0.0 else math.expm1(s * loc) / loc)

    levy = psi.levy
    if levy.density is None or s == 0:
        return total

    def phi(u: np.ndarray) -> np.ndarray:
        points = np.asarray(u, dtype=float)
        return np.expm1(s * points) / points

    if levy.support_end is not None:
        tail = TailBound(T_star=levy.support_end, bound=0.0)
    else:
        if levy.envelope is None:
            raise DivergentTransformError("Levy density declares no behaviour at infinity.")
        shifted = levy.envelope.shifted_power(-1.0)
        tail = choose_truncation(lambda T: profile_tail_bound(1.0, 0.0, shifted, T), spec.target(1.0))

    continuous = MeasureRepr(density=levy.density, p0=levy.p0, envelope=levy.envelope, support_end=levy.support_end)
    outcome = integrate_vector(phi, continuous, spec, tail, time_scale=1.0 / (1.0 + abs(s)))
    return float(total + np.real(outcome.value))


def bernstein_integrability(psi: BernsteinSymbol, r: float) -> tuple[float, float]:
    """``(int_0^r drho, int_r^inf u^{-1} drho(u))``; both must be finite."""

    if r <= 0:
        raise ValueError("Integrability radius must be positive.")
    levy = psi.levy
    head = float(sum(weight for loc, weight in levy.atoms if loc <= r))
    tail = float(sum(weight / loc for loc, weight in levy.atoms if loc > r))
    if levy.density is not None:
        if levy.p0 <= -1.0:
            return math.inf, tail
        density = lambda u: float(levy.evaluate_density(np.array([u]))[0])  # noqa: E731
        head += quad(density, 0.0, r, limit=400)[0]
        tail += quad(lambda u: density(u) / u, r, np.inf, limit=400)[0]
    return head, tail


def validate_measure(measure: MeasureRepr, *, t_small: float = 1e-3, samples: int = 48) -> None:
    """Sample the declared endpoint data and sign information of a measure."""

    if measure.sign_info == "positive" and any(np.real(weight) < 0 or np.imag(weight) != 0 for _, weight in measure.atoms):
        raise MeasureValidationError("Positive measure carries a negative or complex atom.")
    if measure.density is None:
        return

    near = np.geomspace(1e-12 * t_small, t_small, samples)
    scaled = np.abs(measure.evaluate_density(near)) * np.power(near, -measure.p0)
    if not np.all(np.isfinite(scaled)):
        raise MeasureValidationError("Density is not finite near 0.")
    reference = float(np.max(np.abs(measure.evaluate_density(np.array([t_small]))) * t_small ** (-measure.p0)))
    if float(np.max(scaled)) > 1e6 * max(reference, 1.0):
        raise MeasureValidationError(f"density(t) t^{-measure.p0:g} is unbounded near 0; declared exponent is wrong.")

    far = np.geomspace(1.0, 1e3, samples)
    values = measure.evaluate_density(far)
    if measure.sign_info == "positive" and np.any(np.real(values) < 0):
        raise MeasureValidationError("Positive measure has a negative density value.")
    if measure.sign_info == "positive" and np.any(np.real(measure.evaluate_density(near)) < 0):
        raise MeasureValidationError("Positive measure has a negative density value.")
    if measure.envelope is not None:
        limit = measure.envelope(far) * (1.0 + 1e-9) + 1e-300
        if np.any(np.abs(values) > limit):
            raise MeasureValidationError("Density exceeds its declared tail envelope.")


def certify_laplace_symbol(
    sym: LaplaceSymbol,
    samples: Iterable[float] = DEFAULT_SAMPLES,
    spec: QuadratureSpec | None = None,
    tolerance: float = SYMBOL_TOLERANCE,
) -> dict[float, float]:
    """Check that quadrature of the measure reproduces ``sym.evaluate`` at sampled s < 0."""

    validate_measure(sym.measure)
    deviations: dict[float, float] = {}
    for s in samples:
        expected = complex(np.asarray(sym.evaluate(s)))
        measured = complex(symbol_eval_via_measure(sym, s, spec))
        deviation = abs(measured - expected)
        deviations[s] = deviation
        if deviation > tolerance * (1.0 + abs(expected)):
            raise MeasureValidationError(
                f"{sym.label}: measure transform {measured} differs from g({s}) = {expected} by {deviation:.3e}."
            )
    logger.debug("Certified %s at %s.", sym.label, sorted(deviations))
    return deviations


def certify_bernstein_symbol(
    psi: BernsteinSymbol,
    samples: Iterable[float] = DEFAULT_SAMPLES,
    spec: QuadratureSpec | None = None,
    tolerance: float = SYMBOL_TOLERANCE,
) -> dict[float, float]:
    validate_measure(psi.levy)
    if abs(complex(np.asarray(psi.evaluate(0.0))) - psi.c0) > tolerance:
        raise MeasureValidationError(f"{psi.label}: psi(0) differs from c0 = {psi.c0}.")

    points = sorted(samples)
    values = [float(np.real(psi.evaluate(s))) for s in points]
    if any(later < earlier - tolerance for earlier, later in zip(values, values[1:])):
        raise MeasureValidationError(f"{psi.label} is not nondecreasing on the sampled points.")

    for r in (0.01, 1.0, 100.0):
        head, tail = bernstein_integrability(psi, r)
        if not (math.isfinite(head) and math.isfinite(tail)):
            raise MeasureValidationError(f"{psi.label}: Levy measure fails the integrability conditions at r={r}.")

    deviations: dict[float, float] = {}
    for s, expected in zip(points, values):
        measured = bernstein_eval_via_measure(psi, s, spec)
        deviations[s] = abs(measured - expected)
        if deviations[s] > tolerance * (1.0 + abs(expected)):
            raise MeasureValidationError(
                f"{psi.label}: Levy integral {measured} differs from psi({s}) = {expected}."
            )
    return deviations


def subordination_density(psi: BernsteinSymbol, t: float, spec: QuadratureSpec | None = None) -> LaplaceSymbol:
    """``g_t = e^{t psi}`` as a Laplace symbol, after checking its Laplace identity."""

    symbol = build_exp_tpsi(t, psi)
    if t == 0:
        return symbol
    try:
        certify_laplace_symbol(symbol, samples=(-0.5, -1.0, -4.0), spec=spec)
    except MeasureValidationError as exc:
        raise SubordinationUnavailableError(f"Subordination density for {psi.label} failed its check: {exc}") from exc
    return symbol
