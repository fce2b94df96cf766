"""Relative-price variability, regime-interaction regressions and Chow tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from regimekit.core import ConfigError, DataError, NumericalError
from regimekit.smoothing import LabelSeries
from regimekit.volatility import significance_stars

__all__ = [
    "VprSeries",
    "RegimeRegression",
    "ChowResult",
    "vpr",
    "regime_regression",
    "chow_test",
    "regression_table",
    "to_fraction",
]

_DISPLAY = {"moderate": "MOD", "high": "ALTA", "hyper": "HIPER"}


def to_fraction(values, units: str):
    """Convert inflation values to fractions (5% -> 0.05)."""
    if units == "fraction":
        return np.asarray(values, dtype=np.float64)
    if units == "percent":
        return np.asarray(values, dtype=np.float64) / 100.0
    raise ConfigError(f"units must be 'percent' or 'fraction', got {units!r}")


@dataclass(frozen=True)
class VprSeries:
    vpr: np.ndarray
    headline: np.ndarray
    n_sectors: int


def vpr(weights, sector_inflation, headline, units: str = "fraction") -> VprSeries:
    """Weighted squared dispersion of sector inflation around headline, over (1 + pi)^2.

    Inputs are converted to fractions first when ``units="percent"``.
    """
    w = np.asarray(weights, dtype=np.float64)
    pi_i = to_fraction(sector_inflation, units)
    pi = to_fraction(headline, units).reshape(-1)
    if w.ndim != 2 or w.shape != pi_i.shape or w.shape[0] != pi.shape[0]:
        raise DataError(f"shape mismatch: weights {w.shape}, sectors {pi_i.shape}, headline {pi.shape}")
    if np.any(w < 0):
        raise DataError("negative weights")
    if np.any(np.abs(w.sum(axis=1) - 1.0) > 1e-6):
        raise DataError("weights must sum to 1 in every period")
    if np.any(pi == -1.0):
        raise DataError("headline inflation of -100% makes the deflator zero")
    num = np.sum(w * (pi_i - pi[:, None]) ** 2, axis=1)
    out = num / (1.0 + pi) ** 2
    return VprSeries(vpr=out, headline=pi, n_sectors=w.shape[1])


@dataclass(frozen=True)
class RegimeRegression:
    names: tuple[str, ...]
    coef: np.ndarray
    std_errors: np.ndarray
    ssr: float
    tss: float
    n: int
    r2: float
    adj_r2: float
    aic: float
    bic: float
    rmse: float
    dropped: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    label: str = ""

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def df_resid(self) -> int:
        return self.n - self.k

    def params(self) -> dict:
        return dict(zip(self.names, self.coef.tolist()))

    def pvalues(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            t = self.coef / self.std_errors
        return 2 * stats.t.sf(np.abs(t), max(self.df_resid, 1))

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "coefficients": {n: {"estimate": float(c), "std_error": float(s), "p_value": float(p)}
                             for n, c, s, p in zip(self.names, self.coef, self.std_errors, self.pvalues())},
            "dropped": list(self.dropped),
            "notes": list(self.notes),
            "adj_r2": self.adj_r2,
            "r2": self.r2,
            "aic": self.aic,
            "bic": self.bic,
            "rmse": self.rmse,
            "ssr": self.ssr,
            "n": self.n,
        }


def _ols(y, Z, names, label="", dropped=(), notes=()) -> RegimeRegression:
    n, k = Z.shape
    if np.linalg.matrix_rank(Z) < k:
        raise NumericalError(f"design matrix is rank deficient ({', '.join(names)})")
    q, r = np.linalg.qr(Z)
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - Z @ beta
    ssr = float(resid @ resid)
    tss = float(np.sum((y - y.mean()) ** 2))
    df = n - k
    sigma2 = ssr / df if df > 0 else float("nan")
    rinv = np.linalg.inv(r)
    cov = sigma2 * (rinv @ rinv.T)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    r2 = 1.0 - ssr / tss if tss > 0 else float("nan")
    adj = 1.0 - (1.0 - r2) * (n - 1) / df if df > 0 else float("nan")
    if ssr > 0:
        ll = -0.5 * n * (math.log(2 * math.pi) + math.log(ssr / n) + 1.0)
    else:
        ll = math.inf
    return RegimeRegression(
        names=tuple(names), coef=beta, std_errors=se, ssr=ssr, tss=tss, n=n, r2=r2, adj_r2=adj,
        aic=-2 * ll + 2 * k, bic=-2 * ll + k * math.log(n), rmse=math.sqrt(sigma2) if df > 0 else float("nan"),
        dropped=tuple(dropped), notes=tuple(notes), label=label,
    )


def _regime_tag(name) -> str:
    return _DISPLAY.get(str(name), str(name).upper())


def regime_regression(vpr_values, inf, regimes=None, baseline=None, label: str = "") -> RegimeRegression:
    """OLS of VPR on inflation with regime dummies and dummy x inflation terms.

    The lowest regime (or ``baseline``) carries no dummy. A regime whose
    inflation takes fewer than two distinct values cannot identify its own
    slope; its interaction column is dropped and noted. With ``regimes=None``
    or a single regime the base two-coefficient model is fit.
    """
    y = vpr_values.vpr if isinstance(vpr_values, VprSeries) else np.asarray(vpr_values, dtype=np.float64)
    y = y.reshape(-1)
    x = np.asarray(inf, dtype=np.float64).reshape(-1)
    if x.shape != y.shape:
        raise DataError("VPR and inflation series lengths differ")
    names = ["const", "INF"]
    cols = [np.ones_like(x), x]
    dropped, notes = [], []
    if regimes is not None:
        lab = regimes.labels if isinstance(regimes, LabelSeries) else np.asarray(regimes)
        if lab.shape[0] != x.shape[0]:
            raise DataError("regime labels and inflation series lengths differ")
        uniq = _regime_order(lab)
        base = uniq[0] if baseline is None else baseline
        others = [u for u in uniq if u != base]
        dummies = []
        for u in others:
            d = (lab == u).astype(np.float64)
            names.append(_regime_tag(u))
            cols.append(d)
            dummies.append((u, d))
        for u, d in dummies:
            tag = f"{_regime_tag(u)}*INF"
            if np.unique(x[lab == u]).size < 2:
                dropped.append(tag)
                notes.append(f"{tag} dropped: regime {u} has fewer than two distinct inflation values")
                continue
            names.append(tag)
            cols.append(d * x)
    Z = np.column_stack(cols)
    if Z.shape[0] <= Z.shape[1]:
        raise DataError("not enough observations for the regression")
    return _ols(y, Z, names, label=label, dropped=dropped, notes=notes)


_ORDER = ("low", "moderate", "high", "hyper")


def _regime_order(lab):
    uniq = list(np.unique(lab))
    if all(str(u) in _ORDER for u in uniq):
        return sorted(uniq, key=lambda u: _ORDER.index(str(u)))
    return uniq


@dataclass(frozen=True)
class ChowResult:
    F: float
    p_value: float
    q: int
    df_denom: int
    ssr_restricted: float = field(default=float("nan"))
    ssr_full: float = field(default=float("nan"))

    def to_dict(self) -> dict:
        return {"F": self.F, "p_value": self.p_value, "q": self.q, "df_denom": self.df_denom,
                "ssr_restricted": self.ssr_restricted, "ssr_full": self.ssr_full}


def chow_test(restricted: RegimeRegression, full: RegimeRegression) -> ChowResult:
    """F test of the restrictions that reduce ``full`` to ``restricted``."""
    if restricted.n != full.n:
        raise DataError("models were fit on different observations")
    if not set(restricted.names) <= set(full.names):
        raise DataError("restricted model is not nested in the full model")
    q = full.k - restricted.k
    df = full.n - full.k
    if q == 0:
        return ChowResult(0.0, 1.0, 0, df, restricted.ssr, full.ssr)
    if df <= 0:
        raise DataError("no residual degrees of freedom in the full model")
    num = max(restricted.ssr - full.ssr, 0.0) / q
    if full.ssr == 0.0:
        F = math.inf if num > 0 else 0.0
    else:
        F = num / (full.ssr / df)
    p = float(stats.f.sf(F, q, df)) if math.isfinite(F) else 0.0
    return ChowResult(float(F), p, q, df, restricted.ssr, full.ssr)


def regression_table(models, chow=None) -> str:
    """Plain-text table: coefficient rows with stars and standard errors in parentheses."""
    order = []
    for m in models:
        for nme in (*m.names, *m.dropped):
            if nme not in order and nme != "const":
                order.append(nme)
    dummies = [n for n in order if n != "INF" and not n.endswith("*INF")]
    inter = [n for n in order if n.endswith("*INF")]
    rows = ["INF", *dummies, *inter, "const"]
    width = 16
    out = ["".ljust(14) + "".join((m.label or f"({i + 1})").rjust(width) for i, m in enumerate(models))]
    out.append("-" * len(out[0]))
    for name in rows:
        est, se = [], []
        for m in models:
            if name in m.names:
                i = m.names.index(name)
                p = m.pvalues()[i]
                est.append(f"{m.coef[i]:.4f}{significance_stars(p, (0.001, 0.01, 0.05))}")
                se.append(f"({m.std_errors[i]:.4f})")
            elif name in m.dropped:
                est.append("0.0000")
                se.append("(.)")
            else:
                est.append("")
                se.append("")
        label = "Constant" if name == "const" else name
        out.append(label.ljust(14) + "".join(e.rjust(width) for e in est))
        out.append("".ljust(14) + "".join(s.rjust(width) for s in se))
    out.append("-" * len(out[0]))
    for title, attr, fmt in (("Adj. R2", "adj_r2", "{:.3f}"), ("AIC", "aic", "{:.1f}"),
                             ("BIC", "bic", "{:.1f}"), ("RMSE", "rmse", "{:.4f}"), ("Obs.", "n", "{:d}")):
        out.append(title.ljust(14) + "".join(fmt.format(getattr(m, attr)).rjust(width) for m in models))
    if chow:
        out.append("-" * len(out[0]))
        out.append("Chow F".ljust(14) + "".join(("" if c is None else f"{c.F:.2f}").rjust(width) for c in chow))
        out.append("p-value".ljust(14) + "".join(("" if c is None else f"{c.p_value:.3f}").rjust(width) for c in chow))
    out.append("* p<0.05, ** p<0.01, *** p<0.001")
    return "\n".join(out) + "\n"
