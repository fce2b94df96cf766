"""Regime thresholds from a one-variable Gini classification tree.

The tree is grown without depth limit or pruning (``min_leaf=1``) on the
already-clustered labels; its only purpose is to locate the cut points
between regimes. Candidate cuts are midpoints between consecutive distinct
sorted values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from regimekit.core import DataError, RegimeAssignment, ThresholdSet, regime_names

__all__ = ["SplitNode", "Leaf", "best_split", "grow_tree", "fit_thresholds", "thresholds_to_json"]

# scores within this much of the best count as ties; the lowest cut wins
_TIE = 1e-12


@dataclass
class Leaf:
    label: int
    n: int


@dataclass
class SplitNode:
    cut: float
    left: "SplitNode | Leaf"
    right: "SplitNode | Leaf"
    impurity_decrease: float


def _gini_sum(counts: np.ndarray, n: np.ndarray) -> np.ndarray:
    """n * Gini impurity, i.e. n - sum(c^2)/n (zero for empty sides)."""
    sq = np.sum(counts.astype(np.float64) ** 2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(n > 0, n - sq / np.where(n > 0, n, 1), 0.0)


def best_split(x: np.ndarray, y: np.ndarray, n_classes: int):
    """Gini-optimal midpoint cut of sorted ``x`` with integer labels ``y``.

    Returns ``(cut, position, score)`` where the left child is ``x[:position]``
    and ``score`` is the weighted child impurity times n, or ``None`` when no
    cut exists (fewer than two distinct values).
    """
    n = x.size
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), y] = 1
    left = np.cumsum(onehot, axis=0)[:-1]
    total = left[-1] + onehot[-1] if n > 1 else onehot.sum(axis=0)
    valid = np.flatnonzero(x[1:] > x[:-1])
    if valid.size == 0:
        return None
    lc = left[valid]
    nl = (valid + 1).astype(np.float64)
    score = _gini_sum(lc, nl) + _gini_sum(total - lc, n - nl)
    i = int(np.flatnonzero(score <= score.min() + _TIE)[0])
    pos = int(valid[i]) + 1
    return 0.5 * (x[pos - 1] + x[pos]), pos, float(score[i])


def _majority(y: np.ndarray, n_classes: int) -> int:
    return int(np.argmax(np.bincount(y, minlength=n_classes)))


def grow_tree(x, y, n_classes: int | None = None, min_leaf: int = 1):
    """Grow an unpruned Gini tree on one variable. ``x`` need not be sorted."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n_classes = int(y.max()) + 1 if n_classes is None else n_classes
    order = np.argsort(x, kind="stable")
    return _grow(x[order], y[order], n_classes, min_leaf)


def _grow(x, y, n_classes, min_leaf):
    counts = np.bincount(y, minlength=n_classes)
    if np.count_nonzero(counts) <= 1 or x.size < 2 * min_leaf:
        return Leaf(_majority(y, n_classes), int(x.size))
    split = best_split(x, y, n_classes)
    if split is None:
        return Leaf(_majority(y, n_classes), int(x.size))
    cut, pos, score = split
    if pos < min_leaf or x.size - pos < min_leaf:
        return Leaf(_majority(y, n_classes), int(x.size))
    parent = float(_gini_sum(counts[None, :], np.array([float(x.size)]))[0])
    return SplitNode(
        cut=float(cut),
        left=_grow(x[:pos], y[:pos], n_classes, min_leaf),
        right=_grow(x[pos:], y[pos:], n_classes, min_leaf),
        impurity_decrease=(parent - score) / x.size,
    )


def _leaves(node, lo=-np.inf, hi=np.inf):
    """In-order (ascending x) list of (lo, hi, label)."""
    if isinstance(node, Leaf):
        return [(lo, hi, node.label)]
    return _leaves(node.left, lo, node.cut) + _leaves(node.right, node.cut, hi)


def _choose_cuts(x, y, candidates, k):
    """Pick k-1 ascending cuts from ``candidates`` maximizing interval accuracy.

    Dynamic program over candidates: regime r is predicted on
    [cut_{r-1}, cut_r). Ties prefer earlier (lower) cuts.
    """
    m = candidates.size
    # hits[r, j] = # obs of regime r with x < boundary j, boundaries = -inf, candidates..., +inf
    bounds = np.concatenate([[-np.inf], candidates, [np.inf]])
    hits = np.zeros((k, m + 2), dtype=np.int64)
    for r in range(k):
        xr = np.sort(x[y == r])
        hits[r] = np.searchsorted(xr, bounds, side="left")
    # best[r][j]: max correct for regimes 0..r with regime r's upper boundary at index j
    NEG = -1
    best = np.full((k, m + 2), NEG, dtype=np.int64)
    back = np.zeros((k, m + 2), dtype=np.int64)
    for j in range(1, m + 1):
        best[0, j] = hits[0, j] - hits[0, 0]
    for r in range(1, k):
        last = r == k - 1
        for j in [m + 1] if last else range(r + 1, m + 1):
            top, arg = NEG, 0
            for i in range(r, j):
                if best[r - 1, i] == NEG:
                    continue
                v = best[r - 1, i] + hits[r, j] - hits[r, i]
                if v > top:
                    top, arg = v, i
            best[r, j], back[r, j] = top, arg
    j = m + 1
    chosen = []
    for r in range(k - 1, 0, -1):
        j = back[r, j]
        chosen.append(j)
    cuts = bounds[np.array(chosen[::-1])]
    return cuts, best[k - 1, m + 1] / x.size


def fit_thresholds(x, labels, k: int | None = None, names=None) -> ThresholdSet:
    """Cut points separating consecutive regimes along ``x``.

    ``labels`` may be a :class:`RegimeAssignment` (its ordered regimes are
    used) or any label sequence; labels are ranked by their mean ``x``. When
    the labels are interval-separable the tree's cuts are returned directly
    and ``purity`` is 1. Otherwise the k-1 tree cuts giving the most accurate
    interval rule are chosen and ``purity`` reports that accuracy.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    raw = labels.regime_of if isinstance(labels, RegimeAssignment) else np.asarray(labels)
    if raw.shape[0] != x.shape[0]:
        raise DataError("values and labels lengths differ")
    uniq, codes = np.unique(raw, return_inverse=True)
    n_present = uniq.size
    if k is None:
        k = n_present
    if n_present == 1:
        return ThresholdSet(np.empty(0), 1.0, names=tuple(names or regime_names(1)))
    if n_present != k:
        raise DataError(f"labels cover {n_present} regimes, expected {k}")
    if np.unique(x).size < k:
        raise DataError(f"need at least {k} distinct values to place {k - 1} thresholds")
    means = np.array([x[codes == c].mean() for c in range(k)])
    rank = np.empty(k, dtype=np.int64)
    rank[np.argsort(means, kind="stable")] = np.arange(k)
    y = rank[codes]

    tree = grow_tree(x, y, k)
    leaves = _leaves(tree)
    # cuts where the predicted label changes between adjacent leaves
    tree_cuts = np.array([leaves[i][1] for i in range(len(leaves) - 1) if leaves[i][2] != leaves[i + 1][2]])
    if tree_cuts.size == k - 1 and np.all(np.diff(np.array([lf[2] for lf in _merge(leaves)])) == 1):
        cuts = tree_cuts
        purity = float(np.mean(np.searchsorted(cuts, x, side="right") == y))
    else:
        cand = tree_cuts if tree_cuts.size >= k - 1 else _midpoints(x)
        cuts, purity = _choose_cuts(x, y, cand, k)
    if names is None:
        if isinstance(labels, RegimeAssignment):
            names = regime_names(k)
        else:
            names = tuple(str(uniq[np.argsort(means, kind="stable")][r]) for r in range(k))
    return ThresholdSet(cuts, float(purity), tuple(names))


def _merge(leaves):
    out = [leaves[0]]
    for lf in leaves[1:]:
        if lf[2] == out[-1][2]:
            out[-1] = (out[-1][0], lf[1], lf[2])
        else:
            out.append(lf)
    return out


def _midpoints(x):
    u = np.unique(x)
    return 0.5 * (u[:-1] + u[1:])


def thresholds_to_json(ts: ThresholdSet, path=None, counts=None, means=None) -> str:
    """``{regime, min, max}`` rows, optionally with observation counts and means."""
    rows = ts.rows()
    for r, row in enumerate(rows):
        if counts is not None:
            row["observations"] = int(counts[r])
        if means is not None:
            row["mean"] = float(means[r])
    text = json.dumps({"thresholds": rows, "cuts": ts.cuts.tolist(), "purity": ts.purity}, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
