"""CSV ingestion with row normalisation, and CSV/JSON export."""

import csv
import json
from pathlib import Path

import numpy as np

from .exceptions import NegativeEntry, NonNumericCell, RaggedRows, ZeroRowSum
from .simplex import check_simplex_array


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_matrix(path):
    """Parse a rectangular numeric CSV; a non-numeric first row is a header."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise RaggedRows(f"{path}: no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(f"{path}: row {i} has {len(row)} cells, expected {width}", row=i)
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise NonNumericCell(f"{path}: row {i}, column {j}: {cell!r} is not a number",
                                     row=i) from None
    return out


def normalize_rows(A, source="input"):
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        i = int(np.argwhere(~np.isfinite(A))[0, 0])
        raise NonNumericCell(f"{source}: row {i} has a non-finite entry", row=i)
    neg = np.argwhere(A < 0)
    if len(neg):
        i, j = neg[0]
        raise NegativeEntry(f"{source}: row {i}, column {j} is negative", row=int(i))
    s = A.sum(axis=1)
    zero = np.flatnonzero(s <= 0)
    if len(zero):
        raise ZeroRowSum(f"{source}: row {zero[0]} sums to zero", row=int(zero[0]))
    return check_simplex_array(A / s[:, None])


def ingest_csv(path, normalization="row-sum"):
    """Read a nonnegative CSV and divide each row by its sum."""
    if normalization != "row-sum":
        raise ValueError(f"unsupported normalization {normalization!r}")
    return normalize_rows(read_matrix(path), source=str(path))


def write_text(path, text):
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def matrix_to_csv(A, header=None):
    lines = []
    if header:
        lines.append(",".join(header))
    lines.extend(",".join(repr(float(x)) for x in row) for row in np.asarray(A))
    return "\n".join(lines) + "\n"


def _fmt(path, fmt):
    fmt = fmt or Path(path).suffix.lstrip(".").lower() or "csv"
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    return fmt


def export_dataset(X, path, fmt=None):
    if _fmt(path, fmt) == "json":
        write_text(path, json.dumps({"m": int(np.shape(X)[1]), "points": np.asarray(X).tolist()}))
    else:
        write_text(path, matrix_to_csv(X))


def codebook_dict(result, seed=None):
    """JSON-ready record of a CM result."""
    Q = np.asarray(result.codebook)
    return {
        "k": int(Q.shape[0]),
        "m": int(Q.shape[1]),
        "seed": seed,
        "prototypes": Q.tolist(),
        "assignment": result.assignment.codes.tolist(),
        "risk": float(result.risk),
        "trace": [float(r) for r in result.trace.risks],
        "iterations": result.trace.n_iter,
        "termination": result.trace.reason,
    }


def export_codebook(result, path, fmt=None, seed=None):
    if _fmt(path, fmt) == "json":
        write_text(path, json.dumps(codebook_dict(result, seed), indent=2))
    else:
        write_text(path, matrix_to_csv(result.codebook))


def export_report(report, path, fmt=None):
    """Write any object exposing ``to_json`` / ``to_csv``."""
    write_text(path, report.to_json() if _fmt(path, fmt) == "json" else report.to_csv())


def load_dataset(path):
    path = Path(path)
    if path.suffix.lower() == ".json":
        d = json.loads(path.read_text())
        return normalize_rows(np.asarray(d["points"], dtype=float), source=str(path))
    return ingest_csv(path)
