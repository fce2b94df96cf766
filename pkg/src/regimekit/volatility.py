"""ARCH-effect tests and Gaussian GARCH(1,1) estimation.

The mean equation is a constant: ``x_t = mu + e_t``, ``e_t = sqrt(h_t) z_t``,
``h_t = omega + alpha1 * e_{t-1}^2 + beta1 * h_{t-1}`` with ``h_1`` set to
the variance of the demeaned data. Externally computed residuals can be
passed in directly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize, stats

from regimekit import _backend
from regimekit.core import ConfigError, DataError, NumericalError

__all__ = [
    "ArchTestReport",
    "GarchFit",
    "arch_lm_test",
    "ljung_box",
    "arch_tests",
    "garch11_variance",
    "garch11_loglik",
    "garch11_fit",
    "conditional_volatility",
    "simulate_garch11",
    "significance_stars",
    "DEFAULT_LAGS",
]

DEFAULT_LAGS = 5
N_PARAMS = 4
PARAM_NAMES = ("mu", "omega", "alpha1", "beta1")


@dataclass(frozen=True)
class ArchTestReport:
    lags: int
    lm_stat: float = float("nan")
    lm_p: float = float("nan")
    q_stat: float = float("nan")
    q_p: float = float("nan")

    def to_dict(self) -> dict:
        return {"lags": self.lags, "lm_stat": self.lm_stat, "lm_p": self.lm_p, "q_stat": self.q_stat, "q_p": self.q_p}


def _series(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise DataError("series contains non-finite values")
    return x


def arch_lm_test(residuals, lags: int = DEFAULT_LAGS) -> ArchTestReport:
    """Engle's LM test: n * R^2 of e_t^2 on a constant and ``lags`` own lags."""
    e2 = _series(residuals) ** 2
    T = e2.size
    if lags < 1:
        raise ConfigError("lags must be >= 1")
    if T <= lags + 1:
        raise DataError(f"need more than {lags + 1} observations for {lags} lags")
    y = e2[lags:]
    Z = np.column_stack([np.ones(T - lags)] + [e2[lags - j : T - j] for j in range(1, lags + 1)])
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss <= 1e-300 * max(1.0, float(np.sum(y * y))) or tss == 0.0:
        raise DataError("squared residuals are constant; R^2 is undefined")
    beta, *_ = np.linalg.lstsq(Z, y, rcond=None)
    rss = float(np.sum((y - Z @ beta) ** 2))
    n = y.size
    stat = n * (1.0 - rss / tss)
    stat = max(stat, 0.0)
    return ArchTestReport(lags=lags, lm_stat=stat, lm_p=float(stats.chi2.sf(stat, lags)))


def ljung_box(x, lags: int = DEFAULT_LAGS) -> tuple[float, float]:
    """Ljung-Box portmanteau statistic and its chi-square(lags) p-value."""
    x = _series(x)
    n = x.size
    if lags < 1:
        raise ConfigError("lags must be >= 1")
    if n <= lags:
        raise DataError(f"need more than {lags} observations")
    z = x - x.mean()
    denom = float(np.dot(z, z))
    if denom == 0.0:
        raise DataError("degenerate (constant) series")
    q = 0.0
    for j in range(1, lags + 1):
        rho = float(np.dot(z[j:], z[:-j])) / denom
        q += rho * rho / (n - j)
    q *= n * (n + 2)
    return q, float(stats.chi2.sf(q, lags))


def arch_tests(residuals, lags: int = DEFAULT_LAGS) -> ArchTestReport:
    """ARCH-LM on the residuals plus Ljung-Box Q on their squares."""
    lm = arch_lm_test(residuals, lags)
    q, qp = ljung_box(_series(residuals) ** 2, lags)
    return ArchTestReport(lags=lags, lm_stat=lm.lm_stat, lm_p=lm.lm_p, q_stat=q, q_p=qp)


def garch11_variance(e, omega, alpha1, beta1, h1) -> np.ndarray:
    """Conditional-variance recursion over residuals ``e`` starting at ``h1``."""
    return _backend.garch11_filter(_series(e), omega, alpha1, beta1, h1)


def garch11_loglik(x, mu, omega, alpha1, beta1, h1=None) -> float:
    """Gaussian log-likelihood of ``x`` under constant-mean GARCH(1,1)."""
    x = _series(x)
    if h1 is None:
        h1 = float(np.var(x))
    return _backend.garch11_loglik(x - mu, omega, alpha1, beta1, h1)


@dataclass(frozen=True)
class GarchFit:
    mu: float
    omega: float
    alpha1: float
    beta1: float
    cond_var: np.ndarray
    loglik: float
    aic_norm: float
    std_errors: dict
    n: int
    h1: float
    gradient: np.ndarray = field(default_factory=lambda: np.zeros(N_PARAMS))
    start_loglik: float = float("nan")
    converged: bool = True

    @property
    def params(self) -> np.ndarray:
        return np.array([self.mu, self.omega, self.alpha1, self.beta1])

    @property
    def persistence(self) -> float:
        return self.alpha1 + self.beta1

    def coefficient_table(self) -> list[dict]:
        rows = []
        for name, est in zip(PARAM_NAMES, self.params):
            se = self.std_errors.get(name, float("nan"))
            p = float(2 * stats.norm.sf(abs(est / se))) if se > 0 and np.isfinite(se) else float("nan")
            rows.append({"parameter": name, "estimate": float(est), "std_error": float(se), "p_value": p,
                         "stars": significance_stars(p)})
        return rows

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coefficient_table(),
            "num_obs": self.n,
            "aic": self.aic_norm,
            "log_likelihood": self.loglik,
            "h1": self.h1,
            "gradient": self.gradient.tolist(),
            "converged": self.converged,
        }


def significance_stars(p: float, levels=(0.001, 0.01, 0.05)) -> str:
    if not np.isfinite(p):
        return ""
    for n_stars, lvl in zip((3, 2, 1), levels):
        if p < lvl:
            return "*" * n_stars
    return ""


def normalized_aic(loglik: float, n: int, n_params: int = N_PARAMS) -> float:
    """(-2 loglik + 2 n_params) / n."""
    return (-2.0 * loglik + 2.0 * n_params) / n


# Unconstrained parameterization: omega = exp(a); persistence = logistic(b) * _PMAX;
# alpha1 share of persistence = logistic(c). Keeps every iterate positive and stationary.
_PMAX = 1.0 - 1e-6


def _logistic(z):
    return 0.5 * (1.0 + math.tanh(0.5 * z))


def _logit(p):
    return math.log(p / (1.0 - p))


def _to_natural(theta, scale):
    mu, a, b, c = theta
    pers = _logistic(b) * _PMAX
    share = _logistic(c)
    return np.array([mu * scale, math.exp(a) * scale**2, pers * share, pers * (1.0 - share)])


def _to_theta(params, scale):
    mu, omega, alpha1, beta1 = params
    pers = alpha1 + beta1
    return np.array([mu / scale, math.log(omega / scale**2), _logit(pers / _PMAX), _logit(alpha1 / pers)])


def _steps(x, rel, scales):
    ref = np.abs(x) if scales is None else np.asarray(scales, dtype=float)
    return rel * np.maximum(ref, 1e-3)


def _numeric_gradient(f, x, rel=1e-5, scales=None):
    g = np.empty_like(x)
    steps = _steps(x, rel, scales)
    for i in range(x.size):
        step = steps[i]
        up, dn = x.copy(), x.copy()
        up[i] += step
        dn[i] -= step
        g[i] = (f(up) - f(dn)) / (2 * step)
    return g


def _numeric_hessian(f, x, rel=1e-4, scales=None):
    n = x.size
    steps = _steps(x, rel, scales)
    H = np.empty((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        H[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / steps[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = steps[j]
            val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * steps[i] * steps[j])
            H[i, j] = H[j, i] = val
    return H


_STARTS = ((0.05, 0.90), (0.10, 0.60), (0.02, 0.10))
_BOUNDARY = 1e-4
_UNIT_GAP = 1e-5


def garch11_fit(x, h1: float | None = None) -> GarchFit:
    """Maximum-likelihood GARCH(1,1) with a constant mean.

    The optimizer (BFGS followed by a Nelder-Mead polish) works on a reparameterized space so that omega > 0,
    alpha1, beta1 >= 0 and alpha1 + beta1 < 1 hold at every iterate. Several
    starting points are tried and the highest likelihood wins. Standard
    errors come from the inverse numerical Hessian in the natural
    parameterization, restricted to the feasible directions when a
    constraint binds (a parameter at zero gets no standard error). The
    stationarity test likewise uses directional derivatives along those
    directions.
    """
    x = _series(x)
    n = x.size
    if n < 50:
        raise DataError(f"GARCH(1,1) needs at least 50 observations, got {n}")
    var = float(np.var(x))
    if var <= 0:
        raise DataError("constant series")
    h1 = var if h1 is None else float(h1)
    # work on data scaled to unit variance; the likelihood shifts by a constant only
    scale = math.sqrt(var)
    xs = x / scale
    h1s = h1 / var
    mean_s = float(xs.mean())

    def nll_theta(theta):
        try:
            mu, om, a1, b1 = _to_natural(theta, 1.0)
        except OverflowError:
            return 1e300
        ll = _backend.garch11_loglik(xs - mu, om, a1, b1, h1s)
        return -ll if np.isfinite(ll) else 1e300

    best = None
    start_ll = None
    for a0, b0 in _STARTS:
        p0 = np.array([mean_s, 1.0 - a0 - b0, a0, b0])
        th0 = _to_theta(p0, 1.0)
        if start_ll is None:
            start_ll = -nll_theta(th0)
        res = optimize.minimize(nll_theta, th0, method="BFGS", options={"gtol": 1e-7, "maxiter": 2000})
        res2 = optimize.minimize(nll_theta, res.x, method="Nelder-Mead",
                                 options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
        cand = res2 if res2.fun < res.fun else res
        if best is None or cand.fun < best.fun - 1e-9:
            best = cand
    theta = best.x
    params_s = _to_natural(theta, 1.0)
    loglik_s = -best.fun
    if not np.isfinite(loglik_s) or best.fun >= 1e300:
        raise NumericalError("non-finite likelihood at the optimum")

    mu, omega, alpha1, beta1 = _to_natural(theta, scale)
    shift = -n * math.log(scale)
    loglik = loglik_s + shift

    def ll_natural(p):
        m, om, a1, b1 = p
        if om <= 0 or a1 < 0 or b1 < 0 or a1 + b1 >= 1:
            return -math.inf
        return _backend.garch11_loglik(x - m, om, a1, b1, h1)

    # With alpha1 on its boundary beta1 is not identified: every beta1 with the
    # same omega / (1 - beta1) gives (nearly) the same likelihood. Report the
    # constant-variance representative when it is as good.
    if alpha1 < _BOUNDARY:
        flat = np.array([mu, omega / (1.0 - beta1), 0.0, 0.0])
        ll_flat = ll_natural(flat)
        if ll_flat >= loglik - 1e-6 * (1.0 + abs(loglik)):
            mu, omega, alpha1, beta1 = flat
            loglik = ll_flat
    params = np.array([mu, omega, alpha1, beta1])

    # Feasible directions: alpha1 or beta1 sitting at zero is dropped, and when
    # the stationarity bound binds only the (alpha1 up, beta1 down) direction
    # stays inside the parameter space.
    at_alpha = alpha1 <= _BOUNDARY
    at_beta = beta1 <= _BOUNDARY
    at_unit = alpha1 + beta1 >= _PMAX - _UNIT_GAP
    dirs = [np.eye(N_PARAMS)[0], np.eye(N_PARAMS)[1]]
    if at_unit:
        if not (at_alpha or at_beta):
            dirs.append(np.array([0.0, 0.0, 1.0, -1.0]))
    else:
        dirs += [np.eye(N_PARAMS)[i] for i, fixed in ((2, at_alpha), (3, at_beta)) if not fixed]
    A = np.column_stack(dirs)

    def ll_sub(z):
        return ll_natural(params + A @ z)

    z0 = np.zeros(A.shape[1])
    grad_sub = _numeric_gradient(ll_sub, z0, scales=np.abs(A.T) @ np.abs(params))
    grad = np.full(N_PARAMS, np.nan)
    for j in range(A.shape[1]):
        grad[np.argmax(np.abs(A[:, j]))] = grad_sub[j]
    tol = 1e-4 * (1.0 + abs(loglik))
    converged = bool(np.all(np.abs(grad_sub) < tol))
    if not converged:
        raise NumericalError(
            f"GARCH optimizer did not reach a stationary point (gradient norm {np.linalg.norm(grad_sub):.3g})"
        )

    se = np.full(N_PARAMS, np.nan)
    with np.errstate(over="ignore", invalid="ignore"):
        H = -_numeric_hessian(ll_sub, z0, scales=np.abs(A.T) @ np.abs(params))
    if np.all(np.isfinite(H)):
        try:
            cov = A @ np.linalg.inv(H) @ A.T
            free = np.abs(A).sum(axis=1) > 0
            d = np.diag(cov)
            se[free] = np.sqrt(np.where(d[free] > 0, d[free], np.nan))
        except np.linalg.LinAlgError:
            pass
    std_errors = {name: float(s) for name, s in zip(PARAM_NAMES, se)}

    cond_var = garch11_variance(x - mu, omega, alpha1, beta1, h1)
    if not np.all(cond_var > 0):
        raise NumericalError("non-positive conditional variance")
    cond_var.setflags(write=False)
    return GarchFit(
        mu=float(mu), omega=float(omega), alpha1=float(alpha1), beta1=float(beta1),
        cond_var=cond_var, loglik=float(loglik), aic_norm=normalized_aic(loglik, n),
        std_errors=std_errors, n=n, h1=h1, gradient=grad,
        start_loglik=float(start_ll + shift), converged=converged,
    )


def conditional_volatility(fit: GarchFit, sqrt: bool = False) -> np.ndarray:
    """Fitted conditional variance (or standard deviation with ``sqrt=True``)."""
    return np.sqrt(fit.cond_var) if sqrt else np.array(fit.cond_var)


def simulate_garch11(n, mu=0.0, omega=0.1, alpha1=0.1, beta1=0.8, seed=0, burn=500) -> np.ndarray:
    """Simulate a Gaussian constant-mean GARCH(1,1) path of length ``n``."""
    if alpha1 + beta1 >= 1:
        raise ConfigError("alpha1 + beta1 must be < 1 for a stationary process")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n + burn)
    e = np.empty(n + burn)
    h = omega / (1 - alpha1 - beta1)
    for t in range(n + burn):
        if t > 0:
            h = omega + alpha1 * e[t - 1] ** 2 + beta1 * h
        e[t] = math.sqrt(h) * z[t]
    return mu + e[burn:]


def write_fit_json(fit: GarchFit, path, tests: ArchTestReport | None = None) -> None:
    doc = fit.to_dict()
    if tests is not None:
        doc["arch_tests"] = tests.to_dict()
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_cond_var_csv(times, fit: GarchFit, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "cond_var"])
        for t, h in zip(times, fit.cond_var):
            w.writerow([str(t), repr(float(h))])
