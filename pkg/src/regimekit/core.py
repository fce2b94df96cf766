"""Shared domain types, CSV ingestion and standardization."""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "RegimeError",
    "ConfigError",
    "DataError",
    "NumericalError",
    "SeriesMatrix",
    "RegimeAssignment",
    "ThresholdSet",
    "regime_names",
    "load_series",
    "write_csv",
    "standardize",
]


class RegimeError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(RegimeError, ValueError):
    """Invalid parameter or option combination."""

    exit_code = 2


class DataError(RegimeError, ValueError):
    """Input data violates a precondition (missing column, gaps, duplicates...)."""

    exit_code = 3


class NumericalError(RegimeError, ArithmeticError):
    """A numerical procedure failed (non-convergence, singular system...)."""

    exit_code = 4


_NAMED = {
    1: ("low",),
    2: ("low", "high"),
    3: ("low", "moderate", "high"),
    4: ("low", "moderate", "high", "hyper"),
}


def regime_names(k: int) -> tuple[str, ...]:
    """Names for ``k`` ordered regimes, lowest mean first."""
    if k in _NAMED:
        return _NAMED[k]
    return tuple(f"regime{r}" for r in range(k))


def _frozen(a, dtype=None):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SeriesMatrix:
    """T observations of p variables on a strictly increasing time index."""

    times: np.ndarray
    values: np.ndarray
    variable_names: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        times = np.asarray(self.times)
        if values.ndim != 2:
            raise DataError("values must be a T x p matrix")
        T, p = values.shape
        if T < 2 or p < 1:
            raise DataError(f"need T >= 2 and p >= 1, got T={T}, p={p}")
        if times.shape != (T,):
            raise DataError(f"time index has length {times.shape[0]}, expected {T}")
        if len(self.variable_names) != p:
            raise DataError("one variable name per column is required")
        if not np.all(np.isfinite(values)):
            raise DataError("missing or non-finite values")
        if np.any(times[1:] <= times[:-1]):
            if np.any(times[1:] == times[:-1]):
                raise DataError("duplicate time index")
            raise DataError("time index must be strictly increasing")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "variable_names", tuple(self.variable_names))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, name: str | int) -> np.ndarray:
        if isinstance(name, str):
            try:
                name = self.variable_names.index(name)
            except ValueError:
                raise DataError(f"unknown variable {name!r}") from None
        return self.values[:, name]

    def with_column(self, name: str, values) -> "SeriesMatrix":
        values = np.asarray(values, dtype=np.float64).reshape(-1, 1)
        return SeriesMatrix(self.times, np.hstack([self.values, values]), self.variable_names + (name,))

    def select(self, names: Sequence[str]) -> "SeriesMatrix":
        cols = [self.variable_names.index(n) for n in names]
        return SeriesMatrix(self.times, self.values[:, cols], tuple(names))


@dataclass(frozen=True)
class RegimeAssignment:
    """Cluster ids plus their relabeling as ordered regimes.

    ``regime_of[t]`` is the rank of observation t's cluster when clusters are
    sorted ascending by the mean of the first variable.
    """

    cluster_of: np.ndarray
    regime_of: np.ndarray
    k: int
    centers: np.ndarray

    def __post_init__(self):
        cluster_of = np.asarray(self.cluster_of, dtype=np.int64)
        regime_of = np.asarray(self.regime_of, dtype=np.int64)
        if cluster_of.shape != regime_of.shape:
            raise ValueError("cluster_of and regime_of must have the same length")
        present = np.unique(cluster_of)
        if not np.array_equal(present, np.arange(self.k)):
            raise ValueError(f"every cluster id in 0..{self.k - 1} must appear at least once")
        object.__setattr__(self, "cluster_of", _frozen(cluster_of))
        object.__setattr__(self, "regime_of", _frozen(regime_of))
        object.__setattr__(self, "centers", _frozen(np.atleast_2d(np.asarray(self.centers, dtype=np.float64))))

    @property
    def names(self) -> tuple[str, ...]:
        return regime_names(self.k)

    def regime_labels(self) -> list[str]:
        names = self.names
        return [names[r] for r in self.regime_of]


@dataclass(frozen=True)
class ThresholdSet:
    """Ascending cut points; regime r covers [cuts[r-1], cuts[r])."""

    cuts: np.ndarray
    purity: float = 1.0
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        cuts = np.asarray(self.cuts, dtype=np.float64).reshape(-1)
        if np.any(np.diff(cuts) <= 0):
            raise ValueError("threshold cuts must be strictly ascending")
        object.__setattr__(self, "cuts", _frozen(cuts))
        if not self.names:
            object.__setattr__(self, "names", regime_names(cuts.size + 1))

    @property
    def k(self) -> int:
        return self.cuts.size + 1

    def classify(self, x) -> np.ndarray:
        """Regime index of each value under closed-below/open-above intervals."""
        return np.searchsorted(self.cuts, np.asarray(x, dtype=np.float64), side="right")

    def rows(self) -> list[dict]:
        """``{regime, min, max}`` rows; open ends are ``None``."""
        bounds = [None, *self.cuts.tolist(), None]
        return [
            {"regime": self.names[r], "min": bounds[r], "max": bounds[r + 1]}
            for r in range(self.k)
        ]


_DATE_RE = re.compile(r"^(\d{4})-(\d{2})(?:-(\d{2}))?$")
_MISSING = {"", "na", "nan", "null", "none"}


def _parse_date(text: str, row: int) -> np.datetime64:
    m = _DATE_RE.match(text.strip())
    if not m:
        raise DataError(f"row {row}: unparseable date {text!r} (expected YYYY-MM or YYYY-MM-DD)")
    try:
        if m.group(3) is None:
            return np.datetime64(f"{m.group(1)}-{m.group(2)}", "M")
        return np.datetime64(text.strip(), "D")
    except ValueError:
        raise DataError(f"row {row}: invalid date {text!r}") from None


def load_series(
    path,
    columns: Sequence[str] | None = None,
    date_column: str = "date",
    impute: str | None = None,
) -> SeriesMatrix:
    """Read a UTF-8 CSV with a header row into a :class:`SeriesMatrix`.

    Rows are sorted by date. Missing cells raise :class:`DataError` unless
    ``impute="linear"``, which interpolates over row positions (edge gaps
    take the nearest observed value). Row numbers in error messages count the
    header as row 1.
    """
    if impute not in (None, "none", "linear"):
        raise ConfigError(f"unknown imputation {impute!r}")
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if date_column not in header:
            raise DataError(f"missing column {date_column!r}")
        if columns is None:
            columns = [c for c in header if c != date_column]
        for c in columns:
            if c not in header:
                raise DataError(f"missing column {c!r}")
        if not columns:
            raise DataError("no value columns")
        dates, rows = [], []
        for row_no, rec in enumerate(reader, start=2):
            dates.append(_parse_date(rec[date_column] or "", row_no))
            vals = []
            for c in columns:
                cell = (rec[c] or "").strip()
                if cell.lower() in _MISSING:
                    if impute != "linear":
                        raise DataError(f"row {row_no}: missing value in column {c!r}")
                    vals.append(math.nan)
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(f"row {row_no}: unparseable number {cell!r} in column {c!r}") from None
            rows.append(vals)
    if len(rows) < 2:
        raise DataError("need at least two rows")
    units = {d.dtype for d in dates}
    times = np.array(dates, dtype=dates[0].dtype if len(units) == 1 else "datetime64[D]")
    values = np.array(rows, dtype=np.float64)
    order = np.argsort(times, kind="stable")
    times, values = times[order], values[order]
    if np.any(times[1:] == times[:-1]):
        raise DataError("duplicate time index")
    if impute == "linear":
        pos = np.arange(values.shape[0], dtype=np.float64)
        for j in range(values.shape[1]):
            miss = np.isnan(values[:, j])
            if miss.all():
                raise DataError(f"column {columns[j]!r} has no observed values")
            if miss.any():
                values[miss, j] = np.interp(pos[miss], pos[~miss], values[~miss, j])
    return SeriesMatrix(times, values, tuple(columns))


def write_csv(X: SeriesMatrix, path, date_column: str = "date") -> None:
    """Write ``X`` in the format :func:`load_series` reads (17 significant digits)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([date_column, *X.variable_names])
        for t in range(X.T):
            w.writerow([str(X.times[t]), *(repr(float(v)) for v in X.values[t])])


def standardize(X: SeriesMatrix) -> SeriesMatrix:
    """Center each column and scale it to unit sample standard deviation."""
    v = X.values
    mean = v.mean(axis=0)
    centered = v - mean
    sd = centered.std(axis=0, ddof=1)
    bad = [X.variable_names[j] for j in range(X.p) if not sd[j] > 0]
    if bad:
        raise DataError(f"zero-variance column(s): {', '.join(bad)}")
    z = centered / sd
    # one refinement pass brings |mean| and |sd - 1| down to rounding level
    z = z - z.mean(axis=0)
    z = z / z.std(axis=0, ddof=1)
    return SeriesMatrix(X.times, z, X.variable_names)
