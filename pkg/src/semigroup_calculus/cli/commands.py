from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from semigroup_calculus.cli.output import format_catalog, write_oracle_delta, write_report, write_result
from semigroup_calculus.config.run_config import InvalidRunConfig, RunConfig
from semigroup_calculus.data.matrix_io import read_operator_csv, read_vector_csv, shipped_operator
from semigroup_calculus.models import ApplyResult, BernsteinSymbol, Generator, LaplaceSymbol
from semigroup_calculus.services.bp_engine import bp_apply, subordinated_apply
from semigroup_calculus.services.hp_engine import hp_apply, inverse_via_integral, non_convergent_result
from semigroup_calculus.services.linalg_core import DimensionMismatchError, make_generator
from semigroup_calculus.services.quadrature import DivergentIntegralError
from semigroup_calculus.services.symbols import CATALOG, build_from_spec
from semigroup_calculus.utils.parsing import SymbolSpec, parse_suite_list, parse_symbol_spec
from semigroup_calculus.verification import SUITES, SuiteContext, random_vector, run_suites, stable_generator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DIVERGENT = 2
EXIT_ORACLE = 3
EXIT_VERIFY = 4

# catalog parameter name -> RunConfig flag
_FLAG_FOR_PARAMETER = {"alpha": "alpha", "beta": "beta", "t0": "t"}


def resolve_operator_path(value: str | Path) -> Path:
    """A file path, or the name of a shipped operator such as ``diag_1_4``."""

    path = Path(value)
    if path.exists():
        return path
    return shipped_operator(str(value))


def load_generator(config: RunConfig) -> Generator:
    if config.operator_path is None:
        raise InvalidRunConfig("This command needs --operator.", key="operator")
    entries = read_operator_csv(resolve_operator_path(config.operator_path))
    generator = make_generator(entries)
    logger.info("Loaded %dx%d operator (M=%.4g, omega=%.4g).", generator.dim, generator.dim, generator.growth_M, generator.growth_omega)
    return generator


def load_vector(config: RunConfig, dim: int) -> np.ndarray:
    """The configured vector or block; all standard basis vectors when none is given."""

    if config.vector_path is None:
        return np.eye(dim)
    vector = read_vector_csv(config.vector_path)
    if vector.shape[0] != dim:
        raise DimensionMismatchError(f"Vector has dimension {vector.shape[0]}, operator has {dim}.")
    return vector


def resolve_symbol(config: RunConfig) -> LaplaceSymbol | BernsteinSymbol:
    if not config.symbol_spec:
        raise InvalidRunConfig("This command needs --symbol.", key="symbol")
    spec = parse_symbol_spec(config.symbol_spec)
    entry = CATALOG.get(spec.name)
    if entry is not None and not spec.params and spec.inner is None and entry.parameters:
        values = [getattr(config, _FLAG_FOR_PARAMETER.get(name, name), None) for name in entry.parameters]
        if all(value is not None for value in values):
            spec = SymbolSpec(name=spec.name, params=tuple(float(value) for value in values))
    return build_from_spec(spec)


def _calculus_for(symbol: LaplaceSymbol | BernsteinSymbol, requested: str) -> str:
    kind = "hp" if isinstance(symbol, LaplaceSymbol) else "bp"
    if requested not in ("auto", kind):
        raise InvalidRunConfig(f"{symbol.label} is a {symbol.kind} symbol; it cannot run under --calculus {requested}.", key="calculus")
    return kind


def _finish(config: RunConfig, result: ApplyResult, symbol: str) -> int:
    output_dir = Path(config.output_dir)
    write_result(output_dir, result, symbol=symbol)
    if result.oracle_delta is not None:
        write_oracle_delta(output_dir, result)
        logger.info("Oracle deviation %.3e.", result.oracle_delta)
    elif config.require_oracle:
        logger.error("Spectral oracle unavailable for %s: %s", symbol, "; ".join(result.notes))
        return EXIT_ORACLE
    return EXIT_OK


def cmd_apply(config: RunConfig) -> int:
    generator = load_generator(config)
    vector = load_vector(config, generator.dim)
    spec = config.quadrature_spec()
    symbol = resolve_symbol(config)
    calculus = _calculus_for(symbol, config.calculus)

    try:
        if calculus == "bp":
            result = bp_apply(symbol, generator, vector, spec)
        elif symbol.name == "inverse":
            result = inverse_via_integral(generator, vector, spec)
        else:
            result = hp_apply(symbol, generator, vector, spec)
    except DivergentIntegralError as exc:
        result = non_convergent_result(exc, symbol.label)
        write_result(Path(config.output_dir), result, symbol=symbol.label)
        logger.error("%s(A)x is not defined numerically: %s", symbol.label, exc)
        return EXIT_DIVERGENT

    logger.info(result.summary())
    return _finish(config, result, symbol.label)


def cmd_subordinate(config: RunConfig, *, route: str = "direct") -> int:
    """``e^{t psi(A)} x`` for a Bernstein symbol psi and ``--t``."""

    generator = load_generator(config)
    vector = load_vector(config, generator.dim)
    psi = resolve_symbol(config)
    if not isinstance(psi, BernsteinSymbol):
        raise InvalidRunConfig(f"subordinate needs a Bernstein symbol, got {psi.label}.", key="symbol")
    if config.t is None:
        raise InvalidRunConfig("subordinate needs --t.", key="t")

    label = f"exp_tpsi:{config.t:g}:{psi.label}"
    try:
        result = subordinated_apply(psi, config.t, generator, vector, config.quadrature_spec(), route=route)
    except DivergentIntegralError as exc:
        write_result(Path(config.output_dir), non_convergent_result(exc, label), symbol=label)
        logger.error("Subordinated semigroup did not converge: %s", exc)
        return EXIT_DIVERGENT
    return _finish(config, result, label)


def cmd_verify(config: RunConfig) -> int:
    names = parse_suite_list(config.suites or ("all",), SUITES)
    spec = config.quadrature_spec()
    if config.operator_path is not None:
        generator = load_generator(config)
        operator = Path(config.operator_path).stem
    else:
        generator = stable_generator(config.seed, config.dim)
        operator = ""
    if config.vector_path is not None:
        vector = load_vector(config, generator.dim)
        if vector.ndim != 1:
            raise InvalidRunConfig("verify needs a single vector, not a block.", key="vector")
    else:
        vector = random_vector(config.seed, generator.dim)

    symbol = None
    if config.symbol_spec:
        candidate = resolve_symbol(config)
        if not isinstance(candidate, LaplaceSymbol):
            raise InvalidRunConfig("--symbol for verify must be a Laplace symbol.", key="symbol")
        symbol = candidate

    context = SuiteContext(generator=generator, vector=vector, spec=spec, seed=config.seed, symbol=symbol)
    report = run_suites(names, context, operator=operator)
    write_report(Path(config.output_dir), report)

    failures = report.failures
    for record in failures:
        logger.error("%s / %s failed: deviation %.3e > tolerance %.3e %s", record.suite, record.check, record.deviation, record.tolerance, record.detail)
    logger.info("%d/%d checks passed.", len(report.records) - len(failures), len(report.records))
    return EXIT_OK if report.all_passed else EXIT_VERIFY


def cmd_catalog() -> int:
    print(format_catalog(CATALOG.values()))
    return EXIT_OK
