"""Synthetic monthly inflation series with known regime structure.

Run ``python -m regimekit.synthetic OUT_DIR`` to write the demo files used in
the README (``inflation.csv``, ``weights.csv``, ``sectors.csv``).
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

from regimekit.core import SeriesMatrix, write_csv

__all__ = ["regime_path", "synthetic_inflation", "synthetic_sectors", "write_demo"]

# monthly percent means and spreads for low / moderate / high / hyper
MEANS = (1.4, 8.5, 25.0, 110.0)
SPREADS = (0.7, 1.8, 4.0, 15.0)
# (regime, segment length) schedule; hyper is short, as in real episodes
_SCHEDULE = ((0, 60), (1, 24), (0, 48), (1, 36), (2, 12), (1, 18), (0, 36), (2, 10), (3, 5), (2, 8),
             (1, 30), (0, 72), (1, 20), (0, 21))


def regime_path(seed: int = 0, schedule=_SCHEDULE) -> np.ndarray:
    """True regime index per month, with a few one-month transitory blips."""
    path = np.concatenate([np.full(n, r) for r, n in schedule])
    rng = np.random.default_rng(seed)
    low = np.flatnonzero(path == 0)
    blips = rng.choice(low[2:-2], size=max(len(low) // 40, 1), replace=False)
    path = path.copy()
    path[blips] = 1
    return path


def synthetic_inflation(seed: int = 0, start: str = "1943-01") -> tuple[SeriesMatrix, np.ndarray]:
    """Monthly inflation (percent) drawn around each true regime's mean."""
    path = regime_path(seed)
    rng = np.random.default_rng(seed + 1)
    means = np.array(MEANS)[path]
    spreads = np.array(SPREADS)[path]
    values = np.abs(means + spreads * rng.standard_normal(path.size)).round(2)
    times = np.datetime64(start, "M") + np.arange(path.size)
    return SeriesMatrix(times, values[:, None], ("inflation",)), path


def synthetic_sectors(inflation_pct, regimes, n_sectors: int = 6, seed: int = 0):
    """Weights and sector inflation (percent) whose dispersion grows with inflation.

    The dispersion slope steps up with the regime so that regime-interaction
    regressions have a break to find.
    """
    rng = np.random.default_rng(seed + 2)
    T = len(inflation_pct)
    base = rng.dirichlet(np.ones(n_sectors) * 5.0)
    w = np.tile(base, (T, 1))
    pi = np.asarray(inflation_pct, dtype=float) / 100.0
    slope = np.array([0.08, 0.12, 0.2, 0.3])[np.asarray(regimes)]
    dev = rng.standard_normal((T, n_sectors)) * (0.002 + slope * np.abs(pi))[:, None]
    dev -= (w * dev).sum(axis=1, keepdims=True)
    sectors = (pi[:, None] + dev) * 100.0
    return w, sectors


def _write_matrix(path, times, header, M, digits=6):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["date", *header])
        for t, row in zip(times, M):
            wr.writerow([str(t), *(f"{v:.{digits}f}" for v in row)])


def write_demo(out_dir, seed: int = 0) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    X, path = synthetic_inflation(seed)
    write_csv(X, out / "inflation.csv")
    w, sectors = synthetic_sectors(X.values[:, 0], path, seed=seed)
    names = [f"s{i + 1}" for i in range(w.shape[1])]
    _write_matrix(out / "weights.csv", X.times, names, w, digits=12)
    _write_matrix(out / "sectors.csv", X.times, names, sectors)
    return {"inflation": out / "inflation.csv", "weights": out / "weights.csv", "sectors": out / "sectors.csv"}


if __name__ == "__main__":
    for name, p in write_demo(sys.argv[1] if len(sys.argv) > 1 else ".").items():
        print(f"{name}: {p}")
