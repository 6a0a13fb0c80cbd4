"""CSV and JSON readers and writers for matrices, fits, partitions and tables."""
import csv
import json
import math
from pathlib import Path

import numpy as np

from .covariance import DataMatrix, check_symmetric
from .errors import NonFinite
from .glasso import partial_correlations


def fmt(value):
    """Serialize a number with 17 significant digits (round-trips doubles)."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _read_rows(path):
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    try:
        values = np.array([[float(c) for c in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None
    if values.ndim != 2:
        raise ValueError(f"{path}: ragged rows")
    if not np.all(np.isfinite(values)):
        raise NonFinite(f"{path}: NaN or Inf entries")
    return header, values


def read_data_csv(path):
    """Observations in rows; a non-numeric first row is taken as feature names."""
    header, values = _read_rows(path)
    return DataMatrix(values, header)


def read_matrix_csv(path, symmetric=True, atol=1e-8):
    """Read a square matrix; symmetric inputs are validated then averaged."""
    _, values = _read_rows(path)
    return check_symmetric(values, atol=atol) if symmetric else values


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_matrix_csv(path, matrix, names=None, prefix="v"):
    matrix = np.asarray(matrix, dtype=float)
    names = list(names) if names is not None else [f"{prefix}{j}" for j in range(matrix.shape[1])]
    write_table(path, names, matrix.tolist())


def write_edges_csv(path, theta, zero_tol=0.0):
    """Edge list ``(i, j, theta_ij, partial_correlation)`` over pairs ``i < j``."""
    theta = np.asarray(theta, dtype=float)
    pc = partial_correlations(theta)
    i, j = np.nonzero(np.triu(np.abs(theta) > zero_tol, 1))
    rows = [(a, b, theta[a, b], pc[a, b]) for a, b in zip(i.tolist(), j.tolist())]
    write_table(path, ["i", "j", "theta_ij", "partial_correlation"], rows)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
