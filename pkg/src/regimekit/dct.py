"""Euclidean and temporal-contiguity dissimilarity matrices.

The temporal-contiguity distance (DCT) between positions t and s inflates
their Euclidean distance by ``1 + lam * |t - s| / (T - 1)``, so the first
and last observations are pushed apart by at most a factor ``1 + lam``.
Positions are row indices, so irregular sampling is treated as equally
spaced.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from regimekit import _backend
from regimekit.core import ConfigError, DataError, SeriesMatrix

__all__ = ["DissimMatrix", "euclidean_matrix", "dct_matrix", "write_matrix_csv", "DEFAULT_LAMBDA"]

DEFAULT_LAMBDA = 0.1


@dataclass(frozen=True)
class DissimMatrix:
    """Symmetric, non-negative T x T matrix with zero diagonal."""

    d: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64, copy=True)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DataError("dissimilarity matrix must be square")
        if np.any(np.diag(d) != 0.0):
            raise DataError("dissimilarity matrix must have a zero diagonal")
        if not np.array_equal(d, d.T):
            raise DataError("dissimilarity matrix must be symmetric")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise DataError("dissimilarities must be finite and non-negative")
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def T(self) -> int:
        return self.d.shape[0]


def _values(X) -> np.ndarray:
    v = X.values if isinstance(X, SeriesMatrix) else np.asarray(X, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] < 2:
        raise DataError("need at least two observations")
    return v


def euclidean_matrix(X) -> DissimMatrix:
    """Pairwise Euclidean distances between the rows of ``X``."""
    return DissimMatrix(_backend.pairwise_dct(_values(X), 0.0), 0.0)


def dct_matrix(X, lam: float = DEFAULT_LAMBDA) -> DissimMatrix:
    """Temporal-contiguity dissimilarities with smoothing parameter ``lam``.

    ``lam = 0`` reproduces :func:`euclidean_matrix` exactly.
    """
    if not lam >= 0:
        raise ConfigError(f"lambda must be non-negative, got {lam}")
    return DissimMatrix(_backend.pairwise_dct(_values(X), float(lam)), float(lam))


def write_matrix_csv(D: DissimMatrix, path) -> None:
    """Full square CSV, 12 significant digits, no header."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in D.d:
            w.writerow([f"{v:.12g}" for v in row])
