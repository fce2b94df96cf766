"""Principal coordinates analysis (classical metric MDS).

A dissimilarity matrix is turned into Euclidean coordinates via Gower
double-centering and an eigendecomposition, so that k-means can run on the
result. Non-Euclidean inputs such as temporal-contiguity matrices produce
some negative eigenvalues; those directions are dropped and their total
magnitude is reported as ``negative_mass``.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from regimekit.core import ConfigError, DataError, NumericalError
from regimekit.dct import DissimMatrix

__all__ = ["Embedding", "pcoa_embed", "embedding_stress", "write_embedding", "EIGEN_RTOL"]

EIGEN_RTOL = 1e-10


@dataclass(frozen=True)
class Embedding:
    coords: np.ndarray
    eigenvalues: np.ndarray
    retained: int
    negative_mass: float

    @property
    def p(self) -> int:
        return self.coords.shape[1]


def _as_matrix(D) -> np.ndarray:
    return D.d if isinstance(D, DissimMatrix) else np.asarray(D, dtype=np.float64)


def pcoa_embed(D, p: int) -> Embedding:
    """Embed ``D`` into ``p`` principal coordinates.

    Coordinates are the top-``p`` eigenvectors of ``B = -1/2 J D^2 J`` scaled
    by the square roots of their eigenvalues. Eigenvalues with magnitude below
    ``EIGEN_RTOL * max|eigenvalue|`` count as zero; if fewer than ``p`` are
    positive the remaining columns are zero and a warning is issued.
    """
    d = _as_matrix(D)
    T = d.shape[0]
    if not 1 <= p <= T - 1:
        raise ConfigError(f"target dimension must be in 1..{T - 1}, got {p}")
    d2 = d * d
    # J D^2 J without forming J
    B = d2 - d2.mean(axis=0, keepdims=True) - d2.mean(axis=1, keepdims=True) + d2.mean()
    B *= -0.5
    scale = np.abs(B).max()
    if np.abs(B - B.T).max() > 1e-12 * max(scale, 1.0):
        raise DataError("double-centred matrix is not symmetric; input is not a valid dissimilarity")
    B = 0.5 * (B + B.T)
    try:
        evals, evecs = np.linalg.eigh(B)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    tol = EIGEN_RTOL * np.abs(evals).max() if evals.size else 0.0
    evals = np.where(np.abs(evals) <= tol, 0.0, evals)
    n_pos = int(np.sum(evals > 0))
    retained = min(p, n_pos)
    coords = np.zeros((T, p))
    for i in range(retained):
        v = evecs[:, i]
        # deterministic sign: largest-magnitude component positive
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        coords[:, i] = v * np.sqrt(evals[i])
    if retained < p:
        warnings.warn(
            f"only {n_pos} positive eigenvalue(s); {p - retained} coordinate column(s) set to zero",
            RuntimeWarning,
            stacklevel=2,
        )
    negative_mass = float(-evals[evals < 0].sum())
    return Embedding(coords=coords, eigenvalues=evals, retained=retained, negative_mass=negative_mass)


def _coord_distances(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt(np.einsum("tsj,tsj->ts", diff, diff))


def embedding_stress(D, E: Embedding) -> float:
    """Kruskal stress-1 of ``E`` against ``D`` over pairs t < s."""
    d = _as_matrix(D)
    if d.shape[0] != E.coords.shape[0]:
        raise DataError("embedding and dissimilarity matrix sizes disagree")
    iu = np.triu_indices(d.shape[0], k=1)
    target = d[iu]
    denom = float(np.sum(target * target))
    if denom == 0.0:
        raise DataError("stress is undefined for an all-zero dissimilarity matrix")
    fitted = _coord_distances(E.coords)[iu]
    return float(np.sqrt(np.sum((target - fitted) ** 2) / denom))


def write_embedding(E: Embedding, times, csv_path, eigen_path=None) -> None:
    with Path(csv_path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *(f"pc{i + 1}" for i in range(E.p))])
        for t, row in zip(times, E.coords):
            w.writerow([str(t), *(repr(float(v)) for v in row)])
    if eigen_path is not None:
        Path(eigen_path).write_text(json.dumps([float(v) for v in E.eigenvalues]) + "\n", encoding="utf-8")
