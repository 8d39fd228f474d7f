"""CSV and markdown writers for CLI runs.

Every number goes through :func:`format_scalar` and nothing time dependent is
written, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from semigroup_calculus.data.matrix_io import write_vector_csv
from semigroup_calculus.models import ApplyResult, SymbolCatalogEntry
from semigroup_calculus.utils.parsing import format_scalar
from semigroup_calculus.verification.report import VerificationReport

RESULT_FILE = "result.csv"
VALUE_FILE = "value.csv"
ORACLE_FILE = "oracle_delta.csv"
REPORT_MD = "report.md"
REPORT_CSV = "report.csv"

REPORT_COLUMNS = (
    "suite",
    "check",
    "deviation",
    "tolerance",
    "passed",
    "error_estimate",
    "T_star",
    "panels_used",
    "detail",
)


def _number(value: float | None) -> str:
    return "" if value is None else format_scalar(value)


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _value_rows(value: np.ndarray) -> list[tuple[str, str]]:
    array = np.asarray(value)
    if array.ndim == 1:
        return [(f"value[{i}]", format_scalar(entry)) for i, entry in enumerate(array)]
    return [(f"value[{i},{j}]", format_scalar(array[i, j])) for i in range(array.shape[0]) for j in range(array.shape[1])]


def write_result(output_dir: Path, result: ApplyResult, *, symbol: str) -> list[Path]:
    """``result.csv`` (field,value rows) and, when converged, ``value.csv`` in the vector format."""

    rows: list[tuple[str, str]] = [
        ("symbol", symbol),
        ("route", result.route),
        ("domain_verdict", result.domain_verdict),
        ("error_estimate", _number(result.error_estimate)),
        ("tolerance", _number(result.tolerance)),
        ("T_star", _number(result.T_star)),
        ("panels_used", str(result.panels_used)),
    ]
    rows.extend((f"diagnostic:{key}", _number(result.diagnostics[key])) for key in sorted(result.diagnostics))
    rows.extend(("note", note) for note in result.notes)
    if result.value is not None:
        rows.extend(_value_rows(result.value))

    written = [_write_rows(output_dir / RESULT_FILE, ("field", "value"), rows)]
    if result.is_converged and result.value is not None:
        written.append(write_vector_csv(output_dir / VALUE_FILE, result.value))
    return written


def write_oracle_delta(output_dir: Path, result: ApplyResult) -> Path:
    delta = result.oracle_delta
    scale = max(1.0, float(np.linalg.norm(np.ravel(result.value))))
    rows = [
        ("oracle_delta", _number(delta)),
        ("relative_delta", _number(delta / scale)),
    ]
    return _write_rows(output_dir / ORACLE_FILE, ("field", "value"), rows)


def write_report(output_dir: Path, report: VerificationReport) -> list[Path]:
    rows = [
        (
            record.suite,
            record.check,
            _number(record.deviation),
            _number(record.tolerance),
            "pass" if record.passed else "FAIL",
            _number(record.error_estimate),
            _number(record.T_star),
            str(record.panels_used),
            record.detail,
        )
        for record in report.records
    ]
    csv_path = _write_rows(output_dir / REPORT_CSV, REPORT_COLUMNS, rows)

    passed = sum(record.passed for record in report.records)
    lines = [
        "# Verification report",
        "",
        f"- operator: {report.operator or 'random stable generator'}",
        f"- seed: {report.seed}",
        f"- suites: {', '.join(report.suites)}",
        f"- passed: {passed}/{len(report.records)}",
        "",
        "| " + " | ".join(REPORT_COLUMNS) + " |",
        "|" + "---|" * len(REPORT_COLUMNS),
    ]
    lines.extend("| " + " | ".join(cell.replace("|", "\\|") for cell in row) + " |" for row in rows)
    md_path = output_dir / REPORT_MD
    md_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [md_path, csv_path]


def format_catalog(entries: Iterable[SymbolCatalogEntry]) -> str:
    rows = [("name", "kind", "parameters", "ranges", "realizes")]
    rows.extend((entry.name, entry.kind, ", ".join(entry.parameters) or "-", entry.ranges, entry.realizes) for entry in entries)
    widths = [max(len(row[column]) for row in rows) for column in range(4)]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row[:4], widths)) + "  " + row[4] for row in rows]
    return "\n".join(line.rstrip() for line in lines)
