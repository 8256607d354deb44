"""Text and JSON serialization shared by the library and the CLI.

Matrix text format: UTF-8, one row per line, entries separated by
commas, decimal notation with optional exponent, no header. The writer
emits 17 significant digits so that values round-trip exactly.

JSON output uses the same 17-significant-digit float rendering. NaN
values (used to flag absent error fields) are serialized as null.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError
from .linalg import as_matrix


def format_float(v: float) -> str:
    """Render a float with 17 significant digits."""
    return f"{v:.17g}"


def matrix_to_text(A: np.ndarray) -> str:
    A = as_matrix(A)
    return "\n".join(",".join(format_float(v) for v in row) for row in A) + "\n"


def parse_matrix_text(text: str) -> np.ndarray:
    """Parse the shared matrix text format.

    Raises MatrixFormatError with 1-based line and field numbers on bad
    tokens, ragged rows, non-finite values, or empty input.
    """
    rows: list[list[float]] = []
    width = None
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == "":
            if rows:
                continue  # allow trailing blank lines
            raise MatrixFormatError("blank line before any data", lineno)
        fields = line.split(",")
        row = []
        for col, tok in enumerate(fields, start=1):
            tok = tok.strip()
            try:
                v = float(tok)
            except ValueError:
                raise MatrixFormatError(f"cannot parse entry {tok!r}", lineno, col) from None
            if not math.isfinite(v):
                raise MatrixFormatError(f"non-finite entry {tok!r}", lineno, col)
            row.append(v)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixFormatError(
                f"row has {len(row)} entries, expected {width}", lineno, len(row)
            )
        rows.append(row)
    if not rows:
        raise MatrixFormatError("empty matrix file", max(lineno, 1))
    return np.array(rows, dtype=float)


def read_matrix(path: str | Path) -> np.ndarray:
    return parse_matrix_text(Path(path).read_text(encoding="utf-8"))


def write_matrix(path: str | Path, A: np.ndarray) -> None:
    atomic_write_text(path, matrix_to_text(A))


def json_dumps(obj, indent: int = 0) -> str:
    """Serialize dicts/lists/scalars to JSON with 17-digit floats.

    Floats go through format_float; NaN becomes null. Key order is
    insertion order, so output is deterministic.
    """
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return "null" if math.isnan(v) else format_float(v)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(inner + json_dumps(v, indent + 2) for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{inner}"{k}": ' + json_dumps(v, indent + 2) for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temporary file and rename, so failures leave no partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path: str | Path, obj) -> None:
    atomic_write_text(path, json_dumps(obj) + "\n")
