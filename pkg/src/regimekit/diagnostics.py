"""Cluster-count selection curves: elbow, average silhouette and gap statistic."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from regimekit.core import ConfigError, DataError, SeriesMatrix
from regimekit.dct import euclidean_matrix
from regimekit.kmeans import DEFAULT_RESTARTS, kmeans
from regimekit.validation import silhouette

__all__ = ["KSelectionCurve", "elbow_curve", "silhouette_curve", "gap_statistic", "write_curves_csv"]

DEFAULT_REFERENCE_DRAWS = 100


@dataclass(frozen=True)
class KSelectionCurve:
    criterion: str
    ks: np.ndarray
    values: np.ndarray
    selected_k: int
    std_errors: np.ndarray | None = None
    reference_draws: int = 0
    metadata: dict = field(default_factory=dict)

    def to_rows(self) -> list[dict]:
        rows = []
        for i, k in enumerate(self.ks):
            row = {"criterion": self.criterion, "k": int(k), "value": float(self.values[i])}
            if self.std_errors is not None:
                row["std_error"] = float(self.std_errors[i])
            rows.append(row)
        return rows


def _matrix(X) -> np.ndarray:
    v = X.values if isinstance(X, SeriesMatrix) else np.asarray(X, dtype=np.float64)
    return v[:, None] if v.ndim == 1 else v


def _check_kmax(V, kmax, lo=1):
    if not lo <= kmax <= V.shape[0]:
        raise ConfigError(f"kmax must be in {lo}..{V.shape[0]}, got {kmax}")


def _wss_curve(V, kmax, seed, restarts):
    return np.array([kmeans(V, k, restarts=restarts, seed=seed).wss for k in range(1, kmax + 1)])


def elbow_k(wss: np.ndarray) -> int:
    """k with the sharpest bend, i.e. the largest discrete second difference of WSS."""
    if wss.size < 3:
        return 1
    bend = wss[:-2] - 2 * wss[1:-1] + wss[2:]
    return int(np.argmax(bend)) + 2


def elbow_curve(X, kmax: int = 8, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> KSelectionCurve:
    """Best-of-restarts within-cluster sum of squares for k = 1..kmax."""
    V = _matrix(X)
    _check_kmax(V, kmax)
    wss = _wss_curve(V, kmax, seed, restarts)
    return KSelectionCurve(
        "elbow", np.arange(1, kmax + 1), wss, elbow_k(wss),
        metadata={"rule": "max second difference", "restarts": restarts, "seed": seed},
    )


def silhouette_curve(X, kmax: int = 8, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> KSelectionCurve:
    """Mean Euclidean silhouette of the best k-means partition, k = 2..kmax."""
    V = _matrix(X)
    _check_kmax(V, kmax, lo=2)
    D = euclidean_matrix(V)
    vals = np.array([silhouette(D, kmeans(V, k, restarts=restarts, seed=seed).labels).mean for k in range(2, kmax + 1)])
    return KSelectionCurve(
        "silhouette", np.arange(2, kmax + 1), vals, int(np.argmax(vals)) + 2,
        metadata={"rule": "argmax", "restarts": restarts, "seed": seed},
    )


def gap_statistic(
    X,
    kmax: int = 8,
    B: int = DEFAULT_REFERENCE_DRAWS,
    seed: int = 0,
    restarts: int = 10,
) -> KSelectionCurve:
    """Gap statistic with a uniform-over-range reference distribution.

    ``gap(k) = mean_b log W_b(k) - log W(k)`` over ``B`` uniform draws in the
    bounding box of ``X``; ``s_k = sd_b(log W_b(k)) * sqrt(1 + 1/B)``. The
    selected k is the smallest with ``gap(k) >= gap(k+1) - s_{k+1}`` (kmax if
    none qualifies).
    """
    if B < 10:
        raise ConfigError("gap statistic needs B >= 10 reference draws")
    V = _matrix(X)
    _check_kmax(V, kmax)
    lo, hi = V.min(axis=0), V.max(axis=0)
    if np.any(hi <= lo):
        raise DataError("gap statistic undefined for a constant column")
    with np.errstate(divide="ignore"):
        log_w = np.log(_wss_curve(V, kmax, seed, restarts))
    draw_seeds = np.random.SeedSequence(seed).spawn(B)
    ref = np.empty((B, kmax))
    for b, ss in enumerate(draw_seeds):
        rng = np.random.default_rng(ss)
        Z = lo + (hi - lo) * rng.random(V.shape)
        # reference clustering seeds are derived from the draw, not shared with the data run
        sub = int(ss.generate_state(1)[0])
        with np.errstate(divide="ignore"):
            ref[b] = np.log(_wss_curve(Z, kmax, sub, restarts))
    gap = ref.mean(axis=0) - log_w
    sk = ref.std(axis=0) * np.sqrt(1 + 1 / B)
    selected = kmax
    for i in range(kmax - 1):
        if gap[i] >= gap[i + 1] - sk[i + 1]:
            selected = i + 1
            break
    return KSelectionCurve(
        "gap", np.arange(1, kmax + 1), gap, selected, std_errors=sk, reference_draws=B,
        metadata={"reference": "uniform over variable ranges", "restarts": restarts, "seed": seed},
    )


def write_curves_csv(curves, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["criterion", "k", "value", "std_error", "selected"])
        for c in curves:
            for row in c.to_rows():
                w.writerow([
                    row["criterion"], row["k"], repr(row["value"]),
                    repr(row["std_error"]) if "std_error" in row else "",
                    int(row["k"] == c.selected_k),
                ])
