from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Sequence

from semigroup_calculus import __version__
from semigroup_calculus.cli.commands import (
    EXIT_DIVERGENT,
    EXIT_INPUT,
    cmd_apply,
    cmd_catalog,
    cmd_subordinate,
    cmd_verify,
    resolve_operator_path,
)
from semigroup_calculus.config.run_config import CALCULI, RunConfig, load_run_config
from semigroup_calculus.config.settings import get_settings
from semigroup_calculus.services.bp_engine import ROUTES
from semigroup_calculus.services.quadrature import DivergentIntegralError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="INI file with [run], [symbol] and [quadrature] sections")
    parser.add_argument("--operator", help="Operator CSV file, or the name of a shipped operator")
    parser.add_argument("--vector", type=Path, help="Vector CSV file (default: every standard basis vector)")
    parser.add_argument("--symbol", help="Catalog symbol, e.g. frac_power:0.5 or exp_tpsi:1:log_shift")
    parser.add_argument("--alpha", type=float, help="Parameter for frac_power when --symbol has none")
    parser.add_argument("--beta", type=float, help="Parameter for neg_frac_power_bernstein when --symbol has none")
    parser.add_argument("--t", type=float, help="Subordination time, or the shift t0")
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, help="Relative quadrature tolerance")
    parser.add_argument("--out", type=Path, help="Output directory (default: CALCULUS_OUTPUT_DIR)")
    parser.add_argument("--log-level", dest="log_level", help="Logging level (default: CALCULUS_LOG_LEVEL)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semigroup-calculus",
        description="Apply Hille-Phillips and Bochner-Phillips functions of matrix generators and verify calculus rules.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    apply = commands.add_parser("apply", help="Apply a catalog symbol g(A)x or psi(A)x")
    _add_common(apply)
    apply.add_argument("--calculus", choices=CALCULI, help="Force hp (Laplace) or bp (Bernstein)")
    apply.add_argument("--require-oracle", dest="require_oracle", action="store_true", default=None, help="Exit 3 when the spectral oracle is unavailable")

    verify = commands.add_parser("verify", help="Run verification suites")
    _add_common(verify)
    verify.add_argument("--suites", help="Comma separated suite names, or 'all'")
    verify.add_argument("--seed", type=int, help="Seed for the random generator and vector")
    verify.add_argument("--dim", type=int, help="Dimension of the random generator (default 6)")

    subordinate = commands.add_parser("subordinate", help="Apply exp(t psi(A)) to x")
    _add_common(subordinate)
    subordinate.add_argument("--route", choices=ROUTES, default="direct", help="Materialised exponential or subordination density")
    subordinate.add_argument("--require-oracle", dest="require_oracle", action="store_true", default=None, help="Exit 3 when the spectral oracle is unavailable")

    commands.add_parser("catalog", help="List the symbol catalog")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the ``--config`` file, then the flags that were given."""

    base = load_run_config(args.config) if getattr(args, "config", None) else RunConfig()
    suites = getattr(args, "suites", None)
    operator = getattr(args, "operator", None)
    config = base.with_overrides(
        operator_path=resolve_operator_path(operator) if operator else None,
        vector_path=getattr(args, "vector", None),
        symbol_spec=getattr(args, "symbol", None),
        alpha=getattr(args, "alpha", None),
        beta=getattr(args, "beta", None),
        t=getattr(args, "t", None),
        calculus=getattr(args, "calculus", None),
        suites=tuple(part.strip() for part in suites.split(",")) if suites else None,
        output_dir=getattr(args, "out", None),
        seed=getattr(args, "seed", None),
        dim=getattr(args, "dim", None),
        require_oracle=getattr(args, "require_oracle", None),
        quadrature={"rel_tol": getattr(args, "rel_tol", None)},
    )
    if config.operator_path is not None:
        config = config.with_overrides(operator_path=resolve_operator_path(config.operator_path))
    config.check_files()
    return config


def _configure_logging(level: str | None) -> None:
    name = (level or get_settings().log_level).upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level {level!r}.")
    logging.basicConfig(level=numeric, format=LOG_FORMAT)
    logging.getLogger("semigroup_calculus").setLevel(numeric)


def run(args: argparse.Namespace) -> int:
    if args.command == "catalog":
        return cmd_catalog()
    config = config_from_args(args)
    if args.command == "apply":
        return cmd_apply(config)
    if args.command == "verify":
        return cmd_verify(config)
    return cmd_subordinate(config, route=args.route)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _configure_logging(getattr(args, "log_level", None))
        return run(args)
    except DivergentIntegralError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_DIVERGENT
    except (ValueError, OSError, LookupError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INPUT
