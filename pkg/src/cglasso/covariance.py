"""Data ingestion, column standardization and the empirical covariance.

Conventions follow ``S = X^T X / n``: variances divide by ``n`` and no
centering happens inside :func:`empirical_covariance`. Standardize first to
get a unit-diagonal ``S``.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConstantColumn, DimensionMismatch, NonFinite, NotSymmetric


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` observation matrix (rows are observations)."""

    values: np.ndarray
    feature_names: Optional[Sequence[str]] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DimensionMismatch("data must be a 2-d array")
        if values.shape[0] < 2 or values.shape[1] < 1:
            raise DimensionMismatch(
                f"need n >= 2 and p >= 1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFinite("data contains NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.feature_names is not None:
            names = tuple(str(v) for v in self.feature_names)
            if len(names) != values.shape[1]:
                raise DimensionMismatch(
                    f"{len(names)} feature names for {values.shape[1]} columns")
            object.__setattr__(self, "feature_names", names)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


def _as_data(x):
    return x if isinstance(x, DataMatrix) else DataMatrix(x)


def standardize(x):
    """Center each column and scale it to unit mean square (1/n convention).

    Raises
    ------
    ConstantColumn
        If some column has zero variance.
    """
    x = _as_data(x)
    for j in range(x.p):
        if np.ptp(x.values[:, j]) == 0:
            raise ConstantColumn(j)
    values = x.values - x.values.mean(axis=0)
    scale = np.sqrt(np.mean(values ** 2, axis=0))
    return DataMatrix(values / scale, x.feature_names)


def empirical_covariance(x):
    """Return ``X^T X / n`` as a symmetric ``p x p`` array."""
    values = _as_data(x).values
    s = values.T @ values / values.shape[0]
    return symmetrize(s)


def similarity_matrix(s):
    """Elementwise absolute value of a covariance matrix."""
    return np.abs(check_symmetric(s))


def symmetrize(a):
    a = np.asarray(a, dtype=float)
    return (a + a.T) / 2.0


def check_symmetric(s, atol=0.0):
    """Validate a square, finite, symmetric matrix and return it as float array.

    With ``atol > 0`` small asymmetries are tolerated and averaged away.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise NonFinite("matrix contains NaN or Inf")
    gap = np.max(np.abs(s - s.T)) if s.size else 0.0
    if gap > atol:
        raise NotSymmetric(f"matrix is not symmetric (max gap {gap:.3g})")
    return symmetrize(s) if gap > 0 else s


def has_unit_diagonal(s, atol=1e-10):
    """True when ``s`` looks like the covariance of standardized data."""
    return bool(np.all(np.abs(np.diag(s) - 1.0) <= atol))
