"""Internal cluster validation: silhouettes, one-way ANOVA and post-hoc letters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from regimekit import _backend
from regimekit.core import ConfigError, DataError, RegimeAssignment, regime_names
from regimekit.dct import DissimMatrix

__all__ = [
    "SilhouetteResult",
    "AnovaTable",
    "GroupLetters",
    "silhouette",
    "anova_oneway",
    "fisher_lsd",
    "tukey_hsd",
    "compact_letters",
    "DEFAULT_ALPHA",
]

DEFAULT_ALPHA = 0.01


@dataclass(frozen=True)
class SilhouetteResult:
    values: np.ndarray
    labels: np.ndarray
    mean: float

    def cluster_means(self) -> dict[int, float]:
        return {int(c): float(self.values[self.labels == c].mean()) for c in np.unique(self.labels)}


def _codes(labels):
    raw = labels.regime_of if isinstance(labels, RegimeAssignment) else np.asarray(labels)
    uniq, codes = np.unique(raw, return_inverse=True)
    return uniq, codes.astype(np.int64)


def silhouette(D, labels) -> SilhouetteResult:
    """Per-observation silhouette widths on an arbitrary dissimilarity matrix.

    Members of singleton clusters get 0.
    """
    d = D.d if isinstance(D, DissimMatrix) else np.asarray(D, dtype=np.float64)
    uniq, codes = _codes(labels)
    if codes.shape[0] != d.shape[0]:
        raise DataError("labels and dissimilarity matrix sizes differ")
    if uniq.size < 2:
        raise DataError("silhouette needs at least two clusters")
    s = _backend.silhouette_values(d, codes, uniq.size)
    return SilhouetteResult(values=s, labels=uniq[codes], mean=float(s.mean()))


@dataclass(frozen=True)
class AnovaTable:
    df_between: int
    df_within: int
    ss_between: float
    ss_within: float
    ms_between: float
    ms_within: float
    F: float
    p_value: float
    group_means: tuple[float, ...] = ()
    group_sizes: tuple[int, ...] = ()

    @classmethod
    def from_sums(cls, ss_between, df_between, ss_within, df_within, **extra) -> "AnovaTable":
        msb = ss_between / df_between
        msw = ss_within / df_within
        if ss_between == 0.0:
            F, p = 0.0, 1.0
        elif msw == 0.0:
            F, p = float("inf"), 0.0
        else:
            F = msb / msw
            p = float(stats.f.sf(F, df_between, df_within))
        return cls(int(df_between), int(df_within), float(ss_between), float(ss_within), msb, msw, F, p, **extra)

    @property
    def ss_total(self) -> float:
        return self.ss_between + self.ss_within

    def to_dict(self) -> dict:
        return {
            "df_between": self.df_between,
            "df_within": self.df_within,
            "ss_between": self.ss_between,
            "ss_within": self.ss_within,
            "ms_between": self.ms_between,
            "ms_within": self.ms_within,
            "F": self.F,
            "p_value": self.p_value,
        }


def _groups(x, labels):
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    uniq, codes = _codes(labels)
    if codes.shape[0] != x.shape[0]:
        raise DataError("values and labels lengths differ")
    return x, uniq, codes


def anova_oneway(x, labels) -> AnovaTable:
    x, uniq, codes = _groups(x, labels)
    k, T = uniq.size, x.size
    if k < 2:
        raise DataError("ANOVA needs at least two groups")
    if T <= k:
        raise DataError("ANOVA needs more observations than groups")
    sizes = np.bincount(codes, minlength=k)
    if np.any(sizes == 0):
        raise DataError("empty group")
    means = np.bincount(codes, weights=x, minlength=k) / sizes
    grand = x.mean()
    ss_between = float(np.sum(sizes * (means - grand) ** 2))
    ss_within = float(np.sum((x - means[codes]) ** 2))
    return AnovaTable.from_sums(
        ss_between, k - 1, ss_within, T - k,
        group_means=tuple(means.tolist()), group_sizes=tuple(int(s) for s in sizes),
    )


@dataclass(frozen=True)
class GroupLetters:
    """Compact letter display: groups sharing a letter do not differ significantly."""

    groups: tuple
    letters: dict
    alpha: float
    method: str
    significant: frozenset = field(default_factory=frozenset)
    pvalues: dict = field(default_factory=dict)
    critical_value: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "alpha": self.alpha,
            "critical_value": self.critical_value,
            "letters": {str(g): self.letters[g] for g in self.groups},
            "pvalues": {f"{a}|{b}": p for (a, b), p in sorted(self.pvalues.items(), key=str)},
        }


def compact_letters(n: int, significant) -> list[str]:
    """Insert-and-absorb letter assignment for ``n`` groups.

    ``significant`` holds index pairs (i, j) whose means differ. Every
    significant pair ends up with disjoint letter sets and every other pair
    shares at least one letter. Letters are handed out in order of each
    column's lowest member, so groups listed first get ``a``.
    """
    columns = [set(range(n))]
    for i, j in sorted(tuple(sorted(p)) for p in significant):
        nxt = []
        for col in columns:
            if i in col and j in col:
                nxt.append(col - {i})
                nxt.append(col - {j})
            else:
                nxt.append(col)
        # absorb: drop columns contained in another
        uniq = []
        for col in nxt:
            if col and col not in uniq:
                uniq.append(col)
        columns = [c for c in uniq if not any(c < o for o in uniq)]
    columns.sort(key=lambda c: sorted(c))
    if len(columns) > 26:
        raise ConfigError("more than 26 letters required")
    out = ["" for _ in range(n)]
    for idx, col in enumerate(columns):
        for g in sorted(col):
            out[g] += chr(ord("a") + idx)
    return out


def _posthoc_setup(x, labels, alpha):
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    x, uniq, codes = _groups(x, labels)
    table = anova_oneway(x, labels)
    k = uniq.size
    sizes = np.array(table.group_sizes, dtype=np.float64)
    means = np.array(table.group_means)
    # report groups ascending by mean
    order = np.argsort(means, kind="stable")
    if isinstance(labels, RegimeAssignment):
        names = regime_names(labels.k)
        names = tuple(names[int(u)] for u in uniq[order])
    else:
        names = tuple(uniq[order].tolist())
    return table, k, sizes[order], means[order], names


def _letters(names, sig_idx, alpha, method, pvals, crit):
    letters = compact_letters(len(names), sig_idx)
    return GroupLetters(
        groups=names,
        letters={names[i]: letters[i] for i in range(len(names))},
        alpha=alpha,
        method=method,
        significant=frozenset((names[i], names[j]) for i, j in sig_idx),
        pvalues={(names[i], names[j]): p for (i, j), p in pvals.items()},
        critical_value=float(crit),
    )


def fisher_lsd(x, labels, alpha: float = DEFAULT_ALPHA) -> GroupLetters:
    """Unadjusted pairwise t tests on the pooled within-group variance."""
    table, k, n, m, names = _posthoc_setup(x, labels, alpha)
    df = table.df_within
    crit = stats.t.isf(alpha / 2, df)
    sig, pvals = [], {}
    for i in range(k):
        for j in range(i + 1, k):
            se = np.sqrt(table.ms_within * (1 / n[i] + 1 / n[j]))
            diff = abs(m[i] - m[j])
            if se == 0:
                p = 0.0 if diff > 0 else 1.0
            else:
                p = float(2 * stats.t.sf(diff / se, df))
            pvals[(i, j)] = p
            if p < alpha:
                sig.append((i, j))
    return _letters(names, sig, alpha, "fisher_lsd", pvals, crit)


def tukey_hsd(x, labels, alpha: float = DEFAULT_ALPHA) -> GroupLetters:
    """Tukey-Kramer honestly significant differences at family-wise ``alpha``.

    A pair differs when ``|m_i - m_j| / sqrt(MSW/2 * (1/n_i + 1/n_j))``
    exceeds the studentized-range quantile ``q(1 - alpha; k, df_within)``.
    """
    table, k, n, m, names = _posthoc_setup(x, labels, alpha)
    df = table.df_within
    crit = float(stats.studentized_range.ppf(1 - alpha, k, df))
    sig, pvals = [], {}
    for i in range(k):
        for j in range(i + 1, k):
            se = np.sqrt(table.ms_within / 2 * (1 / n[i] + 1 / n[j]))
            diff = abs(m[i] - m[j])
            if se == 0:
                q = np.inf if diff > 0 else 0.0
            else:
                q = diff / se
            pvals[(i, j)] = float(stats.studentized_range.sf(q, k, df)) if np.isfinite(q) else 0.0
            if q > crit:
                sig.append((i, j))
    return _letters(names, sig, alpha, "tukey_hsd", pvals, crit)
