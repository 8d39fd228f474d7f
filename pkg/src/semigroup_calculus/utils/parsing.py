from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np


class InvalidComplexToken(ValueError):
    pass


class InvalidSymbolSpec(ValueError):
    pass


class InvalidSuiteList(ValueError):
    pass


def parse_complex_token(token: str) -> complex:
    """Parse ``a``, ``a+bi``, ``a-bi``, ``bi`` or ``-i`` into a complex number."""

    text = token.strip().replace(" ", "")
    if not text:
        raise InvalidComplexToken("Empty matrix entry.")
    if text[-1] in "iI":
        text = text[:-1] + "j"
    try:
        value = complex(text)
    except ValueError as exc:
        raise InvalidComplexToken(f"Cannot parse entry {token!r}.") from exc
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise InvalidComplexToken(f"Entry {token!r} is not finite.")
    return value


def format_scalar(value: complex | float) -> str:
    """Shortest round-tripping text for a scalar, ``a+bi`` when it is complex."""

    number = complex(value)
    if number.imag == 0.0:
        return repr(float(number.real))
    sign = "-" if np.signbit(number.imag) else "+"
    return f"{float(number.real)!r}{sign}{abs(float(number.imag))!r}i"


@dataclass(frozen=True)
class SymbolSpec:
    name: str
    params: tuple[float, ...] = ()
    inner: Optional["SymbolSpec"] = None

    def __str__(self) -> str:
        parts = [self.name, *(f"{value:g}" for value in self.params)]
        text = ":".join(parts)
        if self.inner is not None:
            text = f"{text}:{self.inner}"
        return text


NESTED_SYMBOLS = {"exp_tpsi": 1}


def parse_symbol_spec(text: str) -> SymbolSpec:
    """Parse the CLI form ``name[:p1[:p2...]]``.

    ``exp_tpsi`` takes a time followed by a nested Bernstein spec, for example
    ``exp_tpsi:2:neg_frac_power_bernstein:0.5``.
    """

    cleaned = text.strip()
    if not cleaned:
        raise InvalidSymbolSpec("Symbol specification is empty.")

    head, *rest = cleaned.split(":")
    name = head.strip()
    if not re.fullmatch(r"[a-z][a-z0-9_]*", name):
        raise InvalidSymbolSpec(f"Invalid symbol name {name!r}.")

    if name in NESTED_SYMBOLS:
        arity = NESTED_SYMBOLS[name]
        if len(rest) <= arity:
            raise InvalidSymbolSpec(f"{name} expects {arity} parameter(s) followed by a Bernstein symbol.")
        params = tuple(_parse_float(value, name) for value in rest[:arity])
        inner = parse_symbol_spec(":".join(rest[arity:]))
        return SymbolSpec(name=name, params=params, inner=inner)

    params = tuple(_parse_float(value, name) for value in rest)
    return SymbolSpec(name=name, params=params)


def _parse_float(value: str, name: str) -> float:
    try:
        return float(value.strip())
    except ValueError as exc:
        raise InvalidSymbolSpec(f"Parameter {value!r} of {name} is not a number.") from exc


def parse_suite_list(text: str | Iterable[str], registered: Iterable[str]) -> tuple[str, ...]:
    known = tuple(registered)
    if isinstance(text, str):
        names = [part.strip() for part in text.split(",")]
    else:
        names = [str(part).strip() for part in text]
    names = [name for name in names if name]
    if not names:
        raise InvalidSuiteList("No verification suites selected.")
    if names == ["all"]:
        return known

    unknown = [name for name in names if name not in known]
    if unknown:
        raise InvalidSuiteList(f"Unknown suite(s): {', '.join(unknown)}. Known suites: {', '.join(known)}.")

    ordered: list[str] = []
    for name in names:
        if name not in ordered:
            ordered.append(name)
    return tuple(ordered)
