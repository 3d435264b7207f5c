"""Matrix Market input and output for real symmetric sparse matrices."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
import scipy.io
from numpy.typing import NDArray

from feast_power.errors import ParseError, UnsupportedFormat
from feast_power.linalg import SparseSymMatrix

logger = logging.getLogger(__name__)

BANNER = "%%matrixmarket"
SUPPORTED_FIELDS = ("real", "integer")


def _parse_header(line: str) -> str:
    """Validate the banner line and return the field type."""
    tokens = line.strip().lower().split()
    if len(tokens) != 5 or tokens[0] != BANNER or tokens[1] != "matrix":
        msg = (
            "Expected '%%MatrixMarket matrix <format> <field> <symmetry>' banner, "
            f"got {line.strip()!r}"
        )
        raise ParseError(msg, line_number=1)
    _, _, layout, field, symmetry = tokens
    if layout != "coordinate":
        msg = f"Only coordinate layout is supported, got {layout!r}"
        raise UnsupportedFormat(msg)
    if field not in SUPPORTED_FIELDS:
        msg = f"Only real or integer fields are supported, got {field!r}"
        raise UnsupportedFormat(msg)
    if symmetry != "symmetric":
        msg = f"Only symmetric matrices are supported, got {symmetry!r}"
        raise UnsupportedFormat(msg)
    return field


def read_matrix_market(path: str | Path) -> SparseSymMatrix:
    """Read a coordinate ``real``/``integer`` ``symmetric`` Matrix Market file.

    Entries are given for the lower triangle with 1-based indices; they are
    mirrored into the upper triangle and duplicates are summed.

    Args:
        path: File to read.

    Returns:
        The matrix with both triangles stored.

    Raises:
        UnsupportedFormat: If the header names another layout, field or symmetry.
        ParseError: If a line cannot be parsed, with its line number.
    """
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        lines = handle.readlines()
    if not lines:
        msg = f"{path} is empty"
        raise ParseError(msg, line_number=1)
    field = _parse_header(lines[0])
    convert = int if field == "integer" else float

    size_line: int | None = None
    n = nnz = 0
    rows: list[int] = []
    cols: list[int] = []
    values: list[float] = []
    for number, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        tokens = line.split()
        if size_line is None:
            try:
                n_rows, n_cols, nnz = (int(token) for token in tokens)
            except ValueError as exc:
                msg = f"Expected 'rows cols nnz' size line, got {line!r}"
                raise ParseError(msg, line_number=number) from exc
            if n_rows != n_cols or n_rows < 1:
                msg = (
                    "Symmetric matrix must be square and nonempty, "
                    f"got {n_rows} x {n_cols}"
                )
                raise ParseError(msg, line_number=number)
            n, size_line = n_rows, number
            continue
        if len(tokens) != 3:
            msg = f"Expected 'row col value', got {line!r}"
            raise ParseError(msg, line_number=number)
        try:
            row, col = int(tokens[0]), int(tokens[1])
            value = float(convert(tokens[2]))
        except ValueError as exc:
            msg = f"Malformed entry {line!r}"
            raise ParseError(msg, line_number=number) from exc
        if not (1 <= col <= row <= n):
            msg = (
                f"Entry ({row}, {col}) is outside the lower triangle "
                f"of a {n} x {n} matrix"
            )
            raise ParseError(msg, line_number=number)
        rows.append(row - 1)
        cols.append(col - 1)
        values.append(value)

    if size_line is None:
        msg = "Missing size line"
        raise ParseError(msg, line_number=len(lines))
    if len(values) != nnz:
        msg = f"Size line announces {nnz} entries, found {len(values)}"
        raise ParseError(msg, line_number=size_line)
    matrix = SparseSymMatrix.from_lower_triplets(n, rows, cols, values)
    logger.info("Read %s: n=%d, nnz=%d", path, matrix.n, matrix.nnz)
    return matrix


def write_matrix_market(
    matrix: SparseSymMatrix, path: str | Path, comment: str = ""
) -> Path:
    """Write the matrix as a coordinate real symmetric Matrix Market file."""
    path = Path(path)
    try:
        scipy.io.mmwrite(
            str(path),
            matrix.csr,
            comment=comment,
            field="real",
            precision=17,
            symmetry="symmetric",
        )
    except OSError as exc:
        msg = f"Cannot write {path}: {exc}"
        raise OSError(msg) from exc
    # scipy appends the extension when it is missing
    return path if path.suffix == ".mtx" else path.with_name(path.name + ".mtx")


def read_reference(path: str | Path) -> NDArray[np.float64]:
    """Read a reference spectrum from an ``eigenvalue`` column, sorted decreasing."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        msg = f"Cannot parse reference spectrum {path}: {exc}"
        raise ParseError(msg) from exc
    if "eigenvalue" not in frame.columns:
        msg = (
            f"Reference spectrum {path} needs an 'eigenvalue' column, "
            f"got {list(frame.columns)}"
        )
        raise ParseError(msg, line_number=1)
    values = pd.to_numeric(frame["eigenvalue"], errors="coerce")
    bad = values.isna()
    if bad.any():
        line = int(np.flatnonzero(bad.to_numpy())[0]) + 2
        msg = f"Non-numeric eigenvalue in {path}"
        raise ParseError(msg, line_number=line)
    return np.sort(values.to_numpy(dtype=np.float64))[::-1].copy()


__all__ = ["read_matrix_market", "read_reference", "write_matrix_market"]
