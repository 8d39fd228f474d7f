from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from semigroup_calculus.utils.parsing import InvalidComplexToken, format_scalar, parse_complex_token

OPERATORS_DIR = Path(__file__).resolve().parent / "operators"


class InvalidMatrixFile(ValueError):
    def __init__(self, message: str, *, path: Path | None = None, line: int | None = None) -> None:
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


def _read_rows(path: Path) -> tuple[int, list[tuple[int, list[str]]]]:
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        rows = [(reader.line_num, row) for row in reader]

    content = [(line, [cell.strip() for cell in row]) for line, row in rows if any(cell.strip() for cell in row)]
    content = [(line, row) for line, row in content if not row[0].startswith("#")]
    if not content:
        raise InvalidMatrixFile("File is empty.", path=path)

    header_line, header = content[0]
    if len(header) != 1 or not header[0].lower().startswith("dim="):
        raise InvalidMatrixFile("First line must be the header 'dim=N'.", path=path, line=header_line)
    try:
        dim = int(header[0].split("=", 1)[1])
    except ValueError as exc:
        raise InvalidMatrixFile("Header dimension is not an integer.", path=path, line=header_line) from exc
    if dim <= 0:
        raise InvalidMatrixFile("Header dimension must be positive.", path=path, line=header_line)
    return dim, content[1:]


def _parse_row(path: Path, line: int, row: list[str]) -> list[complex]:
    try:
        return [parse_complex_token(cell) for cell in row]
    except InvalidComplexToken as exc:
        raise InvalidMatrixFile(str(exc), path=path, line=line) from exc


def _finalize(values: np.ndarray) -> np.ndarray:
    if np.all(values.imag == 0.0):
        return values.real.astype(float)
    return values


def read_operator_csv(path: str | Path) -> np.ndarray:
    """Read a row-major ``dim=N`` matrix file; entries may be ``a+bi`` tokens."""

    file_path = Path(path)
    dim, rows = _read_rows(file_path)
    if len(rows) != dim:
        raise InvalidMatrixFile(f"Expected {dim} matrix rows, found {len(rows)}.", path=file_path)

    parsed = []
    for line, row in rows:
        if len(row) != dim:
            raise InvalidMatrixFile(f"Expected {dim} entries, found {len(row)}.", path=file_path, line=line)
        parsed.append(_parse_row(file_path, line, row))
    return _finalize(np.array(parsed, dtype=complex))


def read_vector_csv(path: str | Path) -> np.ndarray:
    """Read a ``dim=N`` vector file.

    Either one row of N entries (a single vector) or N rows of k entries
    (a block of k column vectors).
    """

    file_path = Path(path)
    dim, rows = _read_rows(file_path)
    if len(rows) == 1 and len(rows[0][1]) == dim:
        line, row = rows[0]
        return _finalize(np.array(_parse_row(file_path, line, row), dtype=complex))

    if len(rows) != dim:
        raise InvalidMatrixFile(f"Expected one row of {dim} entries or {dim} rows.", path=file_path)
    width = len(rows[0][1])
    parsed = []
    for line, row in rows:
        if len(row) != width:
            raise InvalidMatrixFile("Ragged vector block.", path=file_path, line=line)
        parsed.append(_parse_row(file_path, line, row))
    block = _finalize(np.array(parsed, dtype=complex))
    return block[:, 0] if width == 1 else block


def write_operator_csv(path: str | Path, matrix: np.ndarray) -> Path:
    file_path = Path(path)
    entries = np.atleast_2d(np.asarray(matrix))
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with file_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f"dim={entries.shape[0]}"])
        for row in entries:
            writer.writerow([format_scalar(value) for value in row])
    return file_path


def write_vector_csv(path: str | Path, vector: np.ndarray) -> Path:
    file_path = Path(path)
    values = np.asarray(vector)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with file_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f"dim={values.shape[0]}"])
        if values.ndim == 1:
            writer.writerow([format_scalar(value) for value in values])
        else:
            for row in values:
                writer.writerow([format_scalar(value) for value in row])
    return file_path


def shipped_operator(name: str) -> Path:
    candidate = OPERATORS_DIR / (name if name.endswith(".csv") else f"{name}.csv")
    if not candidate.exists():
        available = ", ".join(sorted(path.stem for path in OPERATORS_DIR.glob("*.csv")))
        raise FileNotFoundError(f"No shipped operator named {name!r}. Available: {available}.")
    return candidate
