import json
import math

import numpy as np
import pytest

from oracles import arch_lm_ols, garch_loglik_loop
from regimekit.core import ConfigError, DataError
from regimekit.volatility import (
    DEFAULT_LAGS,
    arch_lm_test,
    arch_tests,
    conditional_volatility,
    garch11_fit,
    garch11_loglik,
    garch11_variance,
    ljung_box,
    normalized_aic,
    significance_stars,
    simulate_garch11,
    write_cond_var_csv,
    write_fit_json,
)


class TestArchLm:
    def test_matches_ols_oracle(self):
        e = np.random.default_rng(0).standard_normal(300)
        assert arch_lm_test(e, 3).lm_stat == pytest.approx(arch_lm_ols(e, 3), rel=1e-9)

    def test_matches_statsmodels(self):
        diag = pytest.importorskip("statsmodels.stats.diagnostic")
        e = simulate_garch11(800, 0, 0.1, 0.2, 0.7, seed=1)
        ours = arch_lm_test(e, 5)
        lm, lm_p, _, _ = diag.het_arch(e, nlags=5)
        assert ours.lm_stat == pytest.approx(lm, rel=1e-8)
        assert ours.lm_p == pytest.approx(lm_p, rel=1e-6, abs=1e-300)

    @pytest.mark.slow
    def test_size_under_null(self):
        rej, pvals = 0, []
        for r in range(200):
            p = arch_lm_test(np.random.default_rng(1000 + r).standard_normal(2000), 5).lm_p
            pvals.append(p)
            rej += p < 0.05
        assert 0.02 <= rej / 200 <= 0.09
        assert 0.4 < np.median(pvals) < 0.6

    @pytest.mark.slow
    def test_power(self):
        hits = sum(arch_lm_test(simulate_garch11(2000, 0, 0.1, 0.2, 0.7, seed=s), 5).lm_p < 0.01 for s in range(50))
        assert hits >= 48

    def test_constant_residuals(self):
        with pytest.raises(DataError):
            arch_lm_test(np.ones(50), 2)

    def test_lag_validation(self):
        with pytest.raises(ConfigError):
            arch_lm_test(np.random.default_rng(0).standard_normal(30), 0)

    def test_default_lags(self):
        assert DEFAULT_LAGS == 5
        assert arch_tests(np.random.default_rng(0).standard_normal(100)).lags == 5


class TestLjungBox:
    def test_matches_statsmodels(self):
        diag = pytest.importorskip("statsmodels.stats.diagnostic")
        x = np.random.default_rng(3).standard_normal(400)
        q, p = ljung_box(x, 6)
        ref = diag.acorr_ljungbox(x, lags=[6])
        assert q == pytest.approx(float(ref["lb_stat"].iloc[0]), rel=1e-10)
        assert p == pytest.approx(float(ref["lb_pvalue"].iloc[0]), rel=1e-8)

    @pytest.mark.slow
    def test_white_noise(self):
        ps = [ljung_box(np.random.default_rng(s).standard_normal(500), 5)[1] for s in range(200)]
        assert 0.4 < np.median(ps) < 0.6

    def test_ar1(self):
        rng = np.random.default_rng(4)
        x = np.zeros(1000)
        for t in range(1, 1000):
            x[t] = 0.9 * x[t - 1] + rng.standard_normal()
        assert ljung_box(x, 5)[1] < 1e-6

    def test_zero_autocorrelation(self):
        # mean zero and every lag-1 product vanishes
        x = np.array([1.0, 0.0, 0.0, -1.0])
        z = x - x.mean()
        assert float(np.dot(z[1:], z[:-1])) == 0.0
        assert ljung_box(x, 1) == (0.0, 1.0)

    def test_constant_series(self):
        with pytest.raises(DataError):
            ljung_box(np.ones(20), 2)


class TestGarchLikelihood:
    def test_loop_oracle(self):
        x = simulate_garch11(200, 0.1, 0.2, 0.15, 0.7, seed=2)
        h1 = float(np.var(x))
        assert garch11_loglik(x, 0.1, 0.2, 0.15, 0.7) == pytest.approx(
            garch_loglik_loop(x, 0.1, 0.2, 0.15, 0.7, h1), rel=1e-12)

    def test_shock_response(self):
        e = np.zeros(10)
        base = garch11_variance(e, 0.1, 0.2, 0.7, 1.0)
        e[4] = 3.0
        shocked = garch11_variance(e, 0.1, 0.2, 0.7, 1.0)
        assert shocked[5] - base[5] == pytest.approx(0.2 * 9.0, rel=1e-14)
        np.testing.assert_array_equal(shocked[:5], base[:5])

    def test_normalized_aic(self):
        assert normalized_aic(2240.452, 959) == pytest.approx(-4.66, abs=0.01)

    def test_stars(self):
        assert [significance_stars(p) for p in (0.0005, 0.005, 0.02, 0.2, float("nan"))] == ["***", "**", "*", "", ""]


class TestGarchFit:
    def test_recovery(self):
        true = np.array([0.0, 0.1, 0.1, 0.8])
        fit = garch11_fit(simulate_garch11(5000, *true, seed=11))
        assert np.all(np.abs(fit.params - true) <= 0.05)
        assert fit.converged
        assert np.all(np.abs(fit.gradient) < 1e-4 * (1 + abs(fit.loglik)))
        assert fit.loglik >= fit.start_loglik
        assert fit.persistence < 1

    def test_conditional_variance_positive_and_mean(self):
        x = simulate_garch11(20000, 0.0, 0.1, 0.1, 0.8, seed=5)
        fit = garch11_fit(x)
        cv = conditional_volatility(fit)
        assert np.all(cv > 0)
        assert cv.mean() == pytest.approx(fit.omega / (1 - fit.alpha1 - fit.beta1), rel=0.1)
        np.testing.assert_allclose(conditional_volatility(fit, sqrt=True), np.sqrt(cv))

    @pytest.mark.parametrize("seed", range(3))
    def test_iid_input(self, seed):
        x = np.random.default_rng(seed).standard_normal(1000) * 2.0 + 1.0
        fit = garch11_fit(x)
        long_run = fit.omega / (1 - fit.alpha1 - fit.beta1)
        assert fit.alpha1 < 0.05
        assert long_run == pytest.approx(np.var(x), rel=0.1)
        if fit.alpha1 == 0.0:
            assert fit.beta1 == 0.0 and fit.omega == pytest.approx(np.var(x), rel=0.1)

    def test_flat_canonical_form(self):
        fit = garch11_fit(np.random.default_rng(2).standard_normal(1000))
        assert (fit.alpha1, fit.beta1) == (0.0, 0.0)
        assert math.isnan(fit.std_errors["alpha1"])

    def test_integrated_optimum(self):
        # two volatility regimes glued together push the fit to alpha1 + beta1 ~ 1
        rng = np.random.default_rng(0)
        x = np.concatenate([rng.normal(1, 0.5, 300), rng.normal(30, 8, 40), rng.normal(2, 1, 300)])
        fit = garch11_fit(x)
        assert fit.converged
        assert np.all(np.isfinite([v for v in fit.std_errors.values()]))

    def test_likelihood_at_optimum_is_maximal(self):
        x = simulate_garch11(1500, 0.0, 0.1, 0.1, 0.8, seed=3)
        fit = garch11_fit(x)
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = fit.params + rng.normal(0, 0.01, 4)
            if p[1] > 0 and p[2] >= 0 and p[3] >= 0 and p[2] + p[3] < 1:
                assert garch11_loglik(x, *p) <= fit.loglik + 1e-8

    def test_short_series(self):
        with pytest.raises(DataError):
            garch11_fit(np.random.default_rng(0).standard_normal(20))

    def test_constant_series(self):
        with pytest.raises(DataError):
            garch11_fit(np.ones(100))

    def test_simulation_requires_stationarity(self):
        with pytest.raises(ConfigError):
            simulate_garch11(10, 0, 0.1, 0.5, 0.5)

    def test_reports(self, tmp_path):
        x = simulate_garch11(600, 0.0, 0.1, 0.1, 0.8, seed=1)
        fit = garch11_fit(x)
        write_fit_json(fit, tmp_path / "g.json", arch_tests(x - x.mean()))
        doc = json.loads((tmp_path / "g.json").read_text())
        assert [r["parameter"] for r in doc["coefficients"]] == ["mu", "omega", "alpha1", "beta1"]
        assert doc["num_obs"] == 600 and doc["aic"] == pytest.approx(normalized_aic(fit.loglik, 600))
        assert {"lm_stat", "q_stat"} <= set(doc["arch_tests"])
        times = np.datetime64("2000-01", "M") + np.arange(600)
        write_cond_var_csv(times, fit, tmp_path / "cv.csv")
        assert len((tmp_path / "cv.csv").read_text().splitlines()) == 601
