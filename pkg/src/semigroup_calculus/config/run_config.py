from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional

from semigroup_calculus.config.settings import get_settings
from semigroup_calculus.models import QuadratureSpec

CALCULI = ("auto", "hp", "bp")

_QUADRATURE_KEYS = {
    "rel_tol": float,
    "abs_tol": float,
    "max_panels": int,
    "panel_order": int,
    "t_min_exponent_handling": str,
    "truncation_mode": str,
}


class InvalidRunConfig(ValueError):
    def __init__(self, message: str, *, path: Path | None = None, key: str | None = None) -> None:
        prefix = f"{path}: " if path is not None else ""
        super().__init__(f"{prefix}{message}")
        self.path = path
        self.key = key


def _default_output_dir() -> Path:
    return get_settings().output_dir


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI run needs; built from defaults, a config file and flags."""

    operator_path: Optional[Path] = None
    vector_path: Optional[Path] = None
    symbol_spec: str = ""
    alpha: Optional[float] = None
    beta: Optional[float] = None
    t: Optional[float] = None
    calculus: str = "auto"
    suites: tuple[str, ...] = ()
    output_dir: Path = field(default_factory=_default_output_dir)
    seed: int = 0
    dim: int = 6
    require_oracle: bool = False
    quadrature: Mapping[str, float | int | str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.calculus not in CALCULI:
            raise InvalidRunConfig(f"calculus must be one of {', '.join(CALCULI)}, got {self.calculus!r}.", key="calculus")
        if self.dim < 1:
            raise InvalidRunConfig("dim must be positive.", key="dim")
        unknown = sorted(set(self.quadrature) - set(_QUADRATURE_KEYS))
        if unknown:
            raise InvalidRunConfig(f"Unknown quadrature key(s): {', '.join(unknown)}.", key=unknown[0])

    def with_overrides(self, **values) -> "RunConfig":
        """Replace fields whose override is not None; quadrature keys are merged."""

        present = {key: value for key, value in values.items() if value is not None}
        quadrature = present.pop("quadrature", None)
        if quadrature:
            present["quadrature"] = {**self.quadrature, **{k: v for k, v in quadrature.items() if v is not None}}
        return replace(self, **present) if present else self

    def quadrature_spec(self) -> QuadratureSpec:
        return QuadratureSpec.from_settings().with_overrides(**self.quadrature)

    def check_files(self) -> None:
        for name in ("operator_path", "vector_path"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise FileNotFoundError(f"{name.replace('_', ' ')} {path} does not exist.")


def _convert(path: Path, key: str, raw: str, kind: type):
    try:
        if kind is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return kind(raw.strip())
    except ValueError as exc:
        raise InvalidRunConfig(f"Key {key!r} has invalid value {raw!r}.", path=path, key=key) from exc


def load_run_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Read an INI file with ``[run]``, ``[symbol]`` and ``[quadrature]`` sections.

    Keys in ``[run]``: operator, vector, suites, seed, dim, output_dir,
    require_oracle, calculus. Keys in ``[symbol]``: spec, alpha, beta, t.
    Relative file paths are resolved against the config file's directory.
    """

    file_path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with file_path.open("r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise InvalidRunConfig(f"Cannot parse config file: {exc}", path=file_path) from exc

    unknown_sections = sorted(set(parser.sections()) - {"run", "symbol", "quadrature"})
    if unknown_sections:
        raise InvalidRunConfig(f"Unknown section(s): {', '.join(unknown_sections)}.", path=file_path)

    def resolve(raw: str) -> Path:
        candidate = Path(raw.strip())
        return candidate if candidate.is_absolute() else file_path.parent / candidate

    values: dict[str, object] = {}
    run = parser["run"] if parser.has_section("run") else {}
    for key, raw in run.items():
        if key in ("operator", "vector"):
            values[f"{key}_path"] = resolve(raw)
        elif key == "output_dir":
            values["output_dir"] = resolve(raw)
        elif key == "suites":
            values["suites"] = tuple(part.strip() for part in raw.split(",") if part.strip())
        elif key in ("seed", "dim"):
            values[key] = _convert(file_path, key, raw, int)
        elif key == "require_oracle":
            values[key] = _convert(file_path, key, raw, bool)
        elif key == "calculus":
            values[key] = raw.strip()
        else:
            raise InvalidRunConfig(f"Unknown key {key!r} in [run].", path=file_path, key=key)

    symbol = parser["symbol"] if parser.has_section("symbol") else {}
    for key, raw in symbol.items():
        if key == "spec":
            values["symbol_spec"] = raw.strip()
        elif key in ("alpha", "beta", "t"):
            values[key] = _convert(file_path, key, raw, float)
        else:
            raise InvalidRunConfig(f"Unknown key {key!r} in [symbol].", path=file_path, key=key)

    quadrature = parser["quadrature"] if parser.has_section("quadrature") else {}
    overrides = {}
    for key, raw in quadrature.items():
        kind = _QUADRATURE_KEYS.get(key)
        if kind is None:
            raise InvalidRunConfig(f"Unknown key {key!r} in [quadrature].", path=file_path, key=key)
        overrides[key] = _convert(file_path, key, raw, kind)
    if overrides:
        values["quadrature"] = overrides

    try:
        return (base or RunConfig()).with_overrides(**values)
    except InvalidRunConfig as exc:
        raise InvalidRunConfig(str(exc), path=file_path, key=exc.key) from exc
