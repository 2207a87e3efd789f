"""Reading and writing matrices and JSON reports.

Matrices go through Matrix Market (array format for dense matrices,
coordinate format for sparse ones) with 17 significant digits so that a
write/read cycle is exact. Dense CSV is accepted on input.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .errors import InputError
from .linalg import SymMatrix

PRECISION = 17


def parse_matrix(text: str, fmt: str = "mtx") -> SymMatrix:
    try:
        if fmt == "csv":
            arr = np.loadtxt(io.StringIO(text), delimiter=",", dtype=np.float64, ndmin=2)
        elif fmt == "mtx":
            obj = scipy.io.mmread(io.BytesIO(text.encode()))
            arr = obj.toarray() if scipy.sparse.issparse(obj) else np.asarray(obj, dtype=np.float64)
        else:
            raise InputError(f"unknown matrix format {fmt!r}")
    except InputError:
        raise
    except Exception as exc:  # scipy and numpy raise a variety of parse errors
        raise InputError(f"cannot parse matrix: {exc}") from None
    return SymMatrix(arr)


def _format_of(path) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "mtx"


def read_matrix(path) -> SymMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_matrix(text, _format_of(path))


def format_matrix(M: SymMatrix, comment: str = "", sparse: bool | None = None) -> str:
    """Matrix Market text for ``M``; ``sparse=None`` picks coordinate format when under half the entries are nonzero."""
    arr = np.asarray(M.array)
    if sparse is None:
        sparse = np.count_nonzero(arr) < arr.size / 2
    buf = io.BytesIO()
    target = scipy.sparse.coo_matrix(arr) if sparse else arr
    scipy.io.mmwrite(buf, target, comment=comment, field="real", precision=PRECISION, symmetry="symmetric")
    return buf.getvalue().decode()


def write_matrix(M: SymMatrix, path, comment: str = "", sparse: bool | None = None) -> None:
    if _format_of(path) == "csv":
        np.savetxt(path, np.asarray(M.array), delimiter=",", fmt="%.17g")
        return
    Path(path).write_text(format_matrix(M, comment, sparse))


def dumps(obj, pretty: bool = False) -> str:
    """Deterministic JSON: sorted keys, single line unless ``pretty``."""
    return json.dumps(obj, sort_keys=True, indent=2 if pretty else None, allow_nan=False)
