"""Trailing-window simple-majority smoothing of a regime label sequence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from regimekit import _backend
from regimekit.core import ConfigError, DataError

__all__ = ["LabelSeries", "majority_smooth", "count_regime_changes", "diff_vs_reference", "DEFAULT_LAGS"]

DEFAULT_LAGS = 4


@dataclass(frozen=True)
class LabelSeries:
    """Regime labels in time order; ``h`` is set on smoothed output."""

    labels: np.ndarray
    h: int | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise DataError("labels must be one-dimensional")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.labels.shape[0]

    def tolist(self) -> list:
        return self.labels.tolist()


def _labels(x) -> np.ndarray:
    return x.labels if isinstance(x, LabelSeries) else np.asarray(x)


def majority_smooth(labels: LabelSeries | Sequence, h: int = DEFAULT_LAGS) -> LabelSeries:
    """Replace each label by the strict majority of the window ``[t-h, t]``.

    The first ``h`` positions are kept. Votes are always counted on the
    original sequence, never on already-smoothed values, and a label must hold
    more than half of the ``h + 1`` window slots to win; otherwise the
    original label stays.
    """
    if h < 0:
        raise ConfigError(f"lag count must be non-negative, got {h}")
    raw = _labels(labels)
    if raw.shape[0] < 1:
        raise DataError("empty label sequence")
    uniq, codes = np.unique(raw, return_inverse=True)
    out = _backend.majority_vote(codes, h, uniq.size)
    return LabelSeries(uniq[out], h)


def count_regime_changes(labels: LabelSeries | Sequence) -> int:
    """Number of positions whose label differs from the previous one."""
    raw = _labels(labels)
    if raw.shape[0] < 1:
        raise DataError("empty label sequence")
    return int(np.count_nonzero(raw[1:] != raw[:-1]))


def diff_vs_reference(a: LabelSeries | Sequence, b: LabelSeries | Sequence) -> int:
    """Number of positions where ``a`` and ``b`` disagree."""
    ra, rb = _labels(a), _labels(b)
    if ra.shape != rb.shape:
        raise DataError(f"label series lengths differ ({ra.shape[0]} vs {rb.shape[0]})")
    return int(np.count_nonzero(ra != rb))
