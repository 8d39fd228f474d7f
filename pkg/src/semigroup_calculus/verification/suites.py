"""Verification suites: each one checks a calculus identity against its tolerance.

Suites receive a :class:`SuiteContext` and append :class:`CheckRecord` rows to
a :class:`VerificationReport`. A suite that raises is recorded as a failure
with the exception text; the remaining suites still run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from semigroup_calculus.models import ApplyResult, Generator, LaplaceSymbol, QuadratureSpec
from semigroup_calculus.services.bp_engine import bp_apply, psi_tilde_apply, subordinated_apply
from semigroup_calculus.services.hp_engine import (
    alpha_limit_check,
    alpha_limit_monotone,
    hp_apply,
    hp_apply_by_parts,
    inverse_via_integral,
    neg_frac_power,
    neg_frac_power_shifted,
)
from semigroup_calculus.services.linalg_core import expm_action
from semigroup_calculus.services.rules import (
    compose_apply,
    log_inverse,
    multiply_apply,
    product_distribution,
    product_symbol,
    reciprocal_bernstein_inverse,
)
from semigroup_calculus.services.symbols import (
    build_exp_tpsi,
    build_frac_power,
    build_inverse,
    build_log_shift,
    build_neg_frac_power_bernstein,
    build_recip_log,
    build_shift,
)
from semigroup_calculus.verification.ensembles import stable_generator
from semigroup_calculus.verification.report import VerificationReport

logger = logging.getLogger(__name__)

HP_ORACLE_TOL = 1e-7
BP_ORACLE_TOL = 1e-6
COMMUTATION_TOL = 1e-8
FACTORIZATION_TOL = 1e-7
PRODUCT_TOL = 1e-6
EQ7_TOL = 1e-7
LOG_TOL = 1e-5
NORM_BOUND_SLACK = 1e-6

POWER_PAIRS = ((0.7, 0.3), (0.9, 0.5))
BETAS = (0.25, 0.5, 0.75)
LIMIT_ALPHAS = (0.5, 0.25, 0.1, 0.05)
SUBORDINATION_TIMES = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class SuiteContext:
    generator: Generator
    vector: np.ndarray
    spec: QuadratureSpec
    seed: int = 0
    symbol: Optional[LaplaceSymbol] = None


SuiteFn = Callable[[SuiteContext, VerificationReport], None]


def _norm(value: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(value)))


def _scale(x: np.ndarray) -> float:
    return 1.0 + _norm(x)


def _oracle(report: VerificationReport, suite: str, check: str, result: ApplyResult, tolerance: float) -> None:
    if result.oracle_delta is None:
        report.fail(suite, check, "; ".join(result.notes) or "oracle unavailable")
        return
    report.check(suite, check, result.oracle_delta, tolerance * max(1.0, _norm(result.value)), result=result)


def suite_eq1(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x, spec = ctx.generator, ctx.vector, ctx.spec
    if ctx.symbol is not None:
        symbols = [ctx.symbol]
    else:
        symbols = [build_frac_power(0.5), build_shift(1.0), build_exp_tpsi(1.0, build_neg_frac_power_bernstein(0.5))]
    Ax = A.entries @ x
    for g in symbols:
        gx = hp_apply(g, A, x, spec, oracle=False)
        gAx = hp_apply(g, A, Ax, spec, oracle=False)
        deviation = _norm(A.entries @ gx.value - gAx.value)
        report.check("eq1", f"A g(A)x = g(A)Ax [{g.label}]", deviation, COMMUTATION_TOL * _scale(x), result=gx)

        moved = hp_apply(g, A, expm_action(A, 0.7, x), spec, oracle=False)
        deviation = _norm(expm_action(A, 0.7, gx.value) - moved.value)
        report.check("eq1", f"T(u)g(A)x = g(A)T(u)x [{g.label}]", deviation, COMMUTATION_TOL * _scale(x), result=moved)


def suite_eq3(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x, spec = ctx.generator, ctx.vector, ctx.spec
    Ax = A.entries @ x
    for alpha in (1.3, 1.7):
        lhs = neg_frac_power(A, alpha, Ax, spec)
        rhs = neg_frac_power(A, alpha - 1.0, x, spec)
        deviation = _norm(lhs.value + rhs.value)
        report.check("eq3", f"(-A)^-{alpha:g} Ax = -(-A)^-{alpha - 1:g} x", deviation, COMMUTATION_TOL * _scale(x), result=lhs)


def suite_eq5(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x, spec = ctx.generator, ctx.vector, ctx.spec
    for beta in BETAS:
        psi = build_neg_frac_power_bernstein(beta)
        tilde = psi_tilde_apply(psi, A, x, spec)
        direct = bp_apply(psi, A, x, spec)
        deviation = _norm(A.entries @ tilde.value - direct.value)
        report.check("eq5", f"A psi~(A)x = psi(A)x [beta={beta:g}]", deviation, FACTORIZATION_TOL * _scale(x), result=tilde)


def suite_eq7(ctx: SuiteContext, report: VerificationReport) -> None:
    for alpha, beta in POWER_PAIRS:
        g, psi = build_frac_power(alpha), build_neg_frac_power_bernstein(beta)
        closed = product_symbol(g, psi).b_measure.distribution_fn
        worst = 0.0
        for t in np.geomspace(0.05, 20.0, 10):
            expected = float(closed(np.array([t]))[0])
            measured = product_distribution(g, psi, float(t))
            worst = max(worst, abs(measured - expected) / abs(expected))
        report.check("eq7", f"b(t) by the product formula [alpha={alpha:g}, beta={beta:g}]", worst, EQ7_TOL)


def suite_eq8(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x, spec = ctx.generator, ctx.vector, ctx.spec
    for alpha in (0.5, 1.5):
        g = build_frac_power(alpha)
        direct = hp_apply(g, A, x, spec, oracle=False)
        parts = hp_apply_by_parts(g, A, x, spec)
        deviation = _norm(direct.value - parts.value)
        report.check("eq8", f"by-parts route [{g.label}]", deviation, COMMUTATION_TOL * _scale(x), result=parts)


def _product_routes(ctx: SuiteContext):
    for alpha, beta in POWER_PAIRS:
        routes = multiply_apply(build_frac_power(alpha), build_neg_frac_power_bernstein(beta), ctx.generator, ctx.vector, ctx.spec)
        yield alpha, beta, routes


def suite_thm3(ctx: SuiteContext, report: VerificationReport) -> None:
    tolerance = PRODUCT_TOL * _scale(ctx.vector)
    for alpha, beta, routes in _product_routes(ctx):
        label = f"alpha={alpha:g}, beta={beta:g}"
        direct, psi_g, g_psi = routes["h_direct"], routes["psi_of_g"], routes["g_of_psi"]
        report.check("thm3", f"h(A)x = psi(A)g(A)x [{label}]", _norm(direct.value - psi_g.value), tolerance, result=direct)
        report.check("thm3", f"psi(A)g(A)x = g(A)psi(A)x [{label}]", _norm(psi_g.value - g_psi.value), tolerance, result=g_psi)


def suite_ex3(ctx: SuiteContext, report: VerificationReport) -> None:
    for alpha, beta, routes in _product_routes(ctx):
        for name, result in routes.items():
            _oracle(report, "ex3", f"{name} vs -(-A)^{beta - alpha:g} [alpha={alpha:g}, beta={beta:g}]", result, BP_ORACLE_TOL)


def _compositions(ctx: SuiteContext) -> dict[str, ApplyResult]:
    return compose_apply(build_frac_power(0.5), build_neg_frac_power_bernstein(0.5), ctx.generator, ctx.vector, ctx.spec)


def suite_thm4(ctx: SuiteContext, report: VerificationReport) -> None:
    routes = _compositions(ctx)
    deviation = _norm(routes["outer_direct"].value - routes["nested"].value)
    report.check("thm4", "(h o psi)(A)x = h(psi(A))x", deviation, PRODUCT_TOL * _scale(ctx.vector), result=routes["outer_direct"])


def suite_ex5(ctx: SuiteContext, report: VerificationReport) -> None:
    for name, result in _compositions(ctx).items():
        _oracle(report, "ex5", f"{name} vs (-A)^-0.25", result, BP_ORACLE_TOL)


def suite_cor9(ctx: SuiteContext, report: VerificationReport) -> None:
    result = reciprocal_bernstein_inverse(build_log_shift(), ctx.generator, ctx.vector, ctx.spec)
    residual = result.diagnostics["round_trip_residual"]
    report.check("cor9", "psi(A)(1/psi)(A)x = x", residual, BP_ORACLE_TOL * _scale(ctx.vector), result=result)
    _oracle(report, "cor9", "(1/psi)(A)x vs oracle", result, BP_ORACLE_TOL)


def suite_ex1(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x = ctx.generator, ctx.vector
    if not A.injective:
        result = inverse_via_integral(A, x, ctx.spec, best_effort=True)
        report.check("ex1", "non-injective A is reported as non-convergent", 0.0 if not result.is_converged else np.inf, 0.0, result=result)
        return
    result = inverse_via_integral(A, x, ctx.spec)
    residual = result.diagnostics["residual"]
    report.check("ex1", "||A y - x|| for y = -int T(t)x dt", residual, COMMUTATION_TOL * max(_norm(x), 1e-300), result=result)


def suite_ex2(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x, spec = ctx.generator, ctx.vector, ctx.spec
    for alpha in (0.3, 0.5, 0.8):
        direct = neg_frac_power(A, alpha, x, spec)
        shifted = neg_frac_power_shifted(A, alpha, x, spec)
        deviation = _norm(direct.value - shifted.value)
        report.check("ex2", f"Gamma formula = (-A)^-(1+alpha)(-A) [alpha={alpha:g}]", deviation, COMMUTATION_TOL * _scale(x), result=shifted)
        _oracle(report, "ex2", f"(-A)^-{alpha:g}x vs oracle", direct, HP_ORACLE_TOL)


def suite_ex4(ctx: SuiteContext, report: VerificationReport) -> None:
    result = log_inverse(ctx.generator, ctx.vector, ctx.spec, route="volterra")
    _oracle(report, "ex4", "(log(I - A))^-1 x vs oracle", result, LOG_TOL)
    excess = max(0.0, _norm(result.value) - result.diagnostics["norm_bound"])
    report.check("ex4", "||result|| <= M||x||/log(1 - omega)", excess, NORM_BOUND_SLACK, result=result)


def suite_remark1(ctx: SuiteContext, report: VerificationReport) -> None:
    volterra = log_inverse(ctx.generator, ctx.vector, ctx.spec, route="volterra")
    resolvent = log_inverse(ctx.generator, ctx.vector, ctx.spec, route="resolvent")
    tolerance = LOG_TOL * _scale(ctx.vector)
    report.check("remark1", "volterra route = resolvent route", _norm(volterra.value - resolvent.value), tolerance, result=resolvent)
    _oracle(report, "remark1", "resolvent route vs oracle", resolvent, LOG_TOL)


def suite_alpha_limit(ctx: SuiteContext, report: VerificationReport) -> None:
    generator = ctx.generator
    detail = ""
    if not generator.is_contraction:
        generator = stable_generator(ctx.seed, generator.dim, kind="contraction")
        detail = "operator is not a contraction; drew a contraction from the seed"
    rows = alpha_limit_check(generator, ctx.vector, LIMIT_ALPHAS, ctx.spec)
    for row in rows:
        report.check("alpha-limit", f"deviation <= bound [alpha={row.alpha:g}]", row.deviation, row.bound, detail=detail)
    monotone = alpha_limit_monotone(rows)
    report.check("alpha-limit", "deviations decrease as alpha -> 0", 0.0 if monotone else np.inf, 0.0, detail=detail)


def suite_subordination(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x, spec = ctx.generator, ctx.vector, ctx.spec
    psi = build_neg_frac_power_bernstein(0.5)
    tolerance = BP_ORACLE_TOL * _scale(x)
    for t in SUBORDINATION_TIMES:
        direct = subordinated_apply(psi, t, A, x, spec, route="direct")
        quadrature = subordinated_apply(psi, t, A, x, spec, route="subordination")
        report.check("subordination", f"direct = stable density route [t={t:g}]", _norm(direct.value - quadrature.value), tolerance, result=quadrature)
        if A.is_contraction:
            excess = max(0.0, _norm(direct.value) - _norm(x))
            report.check("subordination", f"contractivity [t={t:g}]", excess, 10.0 * direct.error_estimate + 1e-12, result=direct)

    whole = subordinated_apply(psi, 1.5, A, x, spec)
    first = subordinated_apply(psi, 1.0, A, x, spec)
    second = subordinated_apply(psi, 0.5, A, first.value, spec)
    report.check("subordination", "g_{t+s}(A)x = g_t(A)g_s(A)x", _norm(whole.value - second.value), COMMUTATION_TOL * _scale(x), result=whole)


def suite_oracle(ctx: SuiteContext, report: VerificationReport) -> None:
    A, x, spec = ctx.generator, ctx.vector, ctx.spec
    laplace = [
        build_inverse(),
        build_frac_power(0.5),
        build_frac_power(1.5),
        build_recip_log(),
        build_shift(1.0),
        build_exp_tpsi(1.0, build_neg_frac_power_bernstein(0.5)),
        build_exp_tpsi(1.0, build_log_shift()),
    ]
    for g in laplace:
        _oracle(report, "oracle", f"hp_apply [{g.label}]", hp_apply(g, A, x, spec), HP_ORACLE_TOL)
    bernstein = [build_neg_frac_power_bernstein(beta) for beta in BETAS] + [build_log_shift()]
    for psi in bernstein:
        _oracle(report, "oracle", f"bp_apply [{psi.label}]", bp_apply(psi, A, x, spec), BP_ORACLE_TOL)


SUITES: dict[str, SuiteFn] = {
    "eq1": suite_eq1,
    "eq3": suite_eq3,
    "eq5": suite_eq5,
    "eq7": suite_eq7,
    "eq8": suite_eq8,
    "thm3": suite_thm3,
    "thm4": suite_thm4,
    "cor9": suite_cor9,
    "ex1": suite_ex1,
    "ex2": suite_ex2,
    "ex3": suite_ex3,
    "ex4": suite_ex4,
    "ex5": suite_ex5,
    "remark1": suite_remark1,
    "alpha-limit": suite_alpha_limit,
    "subordination": suite_subordination,
    "oracle": suite_oracle,
}


def run_suites(names: Iterable[str], ctx: SuiteContext, *, operator: str = "") -> VerificationReport:
    report = VerificationReport(seed=ctx.seed, operator=operator)
    for name in names:
        suite = SUITES[name]
        logger.info("Running suite %s.", name)
        try:
            suite(ctx, report)
        except (ArithmeticError, ValueError, LookupError, RuntimeError) as exc:
            logger.warning("Suite %s raised %s: %s", name, type(exc).__name__, exc)
            report.fail(name, "suite completed", f"{type(exc).__name__}: {exc}")
    return report
