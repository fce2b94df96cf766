"""Lloyd k-means with k-means++ seeding and ordered regime relabeling."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from regimekit import _backend
from regimekit.core import ConfigError, DataError, RegimeAssignment, SeriesMatrix

__all__ = ["KMeansResult", "kmeans", "kmeans_plusplus", "order_regimes", "DEFAULT_K", "DEFAULT_RESTARTS"]

DEFAULT_K = 4
DEFAULT_RESTARTS = 25
DEFAULT_MAX_ITER = 300


@dataclass(frozen=True)
class KMeansResult:
    assignment: RegimeAssignment
    wss: float
    iterations: int
    seed: int
    restarts: int = DEFAULT_RESTARTS
    max_iter: int = DEFAULT_MAX_ITER

    @property
    def labels(self) -> np.ndarray:
        return self.assignment.cluster_of

    def to_dict(self) -> dict:
        a = self.assignment
        return {
            "k": a.k,
            "centers": a.centers.tolist(),
            "labels": a.cluster_of.tolist(),
            "regimes": a.regime_of.tolist(),
            "regime_names": list(a.names),
            "wss": self.wss,
            "iterations": self.iterations,
            "seed": self.seed,
            "restarts": self.restarts,
            "max_iter": self.max_iter,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _matrix(X) -> np.ndarray:
    v = X.values if isinstance(X, SeriesMatrix) else np.asarray(X, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None]
    return np.ascontiguousarray(v, dtype=np.float64)


def kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``k`` initial centers by D^2 sampling."""
    T = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    first = int(rng.integers(T))
    centers[0] = X[first]
    closest = np.sum((X - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            idx = int(rng.integers(T))
        else:
            u = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest), u, side="right"))
            idx = min(idx, T - 1)
        centers[c] = X[idx]
        closest = np.minimum(closest, np.sum((X - centers[c]) ** 2, axis=1))
    return centers


def _ordering(assignment_labels: np.ndarray, values0: np.ndarray, k: int) -> np.ndarray:
    """rank[c] = regime index of cluster c (ascending mean, ties by cluster id)."""
    means = np.array([values0[assignment_labels == c].mean() for c in range(k)])
    order = np.argsort(means, kind="stable")
    rank = np.empty(k, dtype=np.int64)
    rank[order] = np.arange(k)
    return rank


def kmeans(
    X,
    k: int = DEFAULT_K,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | None = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    order_by=None,
) -> KMeansResult:
    """Best-of-``restarts`` Lloyd k-means.

    Each restart draws its k-means++ seeding from its own child of
    ``SeedSequence(seed)``, so results depend only on ``seed``. Regimes are
    ordered by the cluster means of the first column of ``order_by``
    (default: ``X`` itself).
    """
    V = _matrix(X)
    T = V.shape[0]
    if not 1 <= k <= T:
        raise ConfigError(f"k must be in 1..{T}, got {k}")
    if restarts < 1:
        raise ConfigError("restarts must be >= 1")
    n_distinct = np.unique(V, axis=0).shape[0]
    if k > n_distinct:
        raise DataError(f"cannot form {k} clusters from {n_distinct} distinct rows")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
    children = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    for child in children:
        rng = np.random.default_rng(child)
        init = kmeans_plusplus(V, k, rng)
        labels, centers, wss, it = _backend.lloyd(V, init, max_iter)
        if best is None or wss < best[2]:
            best = (labels, centers, wss, it)
    labels, centers, wss, it = best
    ref = V if order_by is None else _matrix(order_by)
    rank = _ordering(labels, ref[:, 0], k)
    assignment = RegimeAssignment(cluster_of=labels, regime_of=rank[labels], k=k, centers=centers)
    return KMeansResult(assignment, float(wss), int(it), int(seed), restarts, max_iter)


def order_regimes(result: KMeansResult, X) -> RegimeAssignment:
    """Relabel clusters 0..k-1 ascending by the mean of ``X``'s first column."""
    a = result.assignment
    V = _matrix(X)
    if V.shape[0] != a.cluster_of.shape[0]:
        raise DataError("data and assignment lengths differ")
    rank = _ordering(a.cluster_of, V[:, 0], a.k)
    return RegimeAssignment(cluster_of=a.cluster_of, regime_of=rank[a.cluster_of], k=a.k, centers=a.centers)
