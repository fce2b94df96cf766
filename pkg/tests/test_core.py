import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from regimekit.core import (
    ConfigError,
    DataError,
    NumericalError,
    RegimeAssignment,
    SeriesMatrix,
    ThresholdSet,
    load_series,
    regime_names,
    standardize,
    write_csv,
)


def _write(tmp_path, text, name="in.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def _monthly(T, start="1943-01"):
    return np.datetime64(start, "M") + np.arange(T)


class TestLoadSeries:
    def test_two_rows(self, tmp_path):
        X = load_series(_write(tmp_path, "date,inflation\n1943-02,1.2\n1943-03,0.8\n"))
        assert (X.T, X.p) == (2, 1)
        np.testing.assert_array_equal(X.values, [[1.2], [0.8]])
        assert X.variable_names == ("inflation",)

    def test_duplicate_date(self, tmp_path):
        with pytest.raises(DataError, match="duplicate time index"):
            load_series(_write(tmp_path, "date,x\n1943-02,1\n1943-02,2\n"))

    def test_959_monthly_rows(self, tmp_path):
        rows = "".join(f"{t},{i * 0.01:.2f}\n" for i, t in enumerate(_monthly(959)))
        X = load_series(_write(tmp_path, "date,inflation\n" + rows))
        assert X.T == 959

    def test_rows_sorted_by_date(self, tmp_path):
        X = load_series(_write(tmp_path, "date,x\n1943-03,3\n1943-01,1\n1943-02,2\n"))
        np.testing.assert_array_equal(X.values[:, 0], [1, 2, 3])

    def test_daily_dates(self, tmp_path):
        X = load_series(_write(tmp_path, "date,x\n2001-01-15,1\n2001-02-15,2\n"))
        assert X.times.dtype == np.dtype("datetime64[D]")

    def test_missing_value_rejected_with_row_number(self, tmp_path):
        with pytest.raises(DataError, match="row 3"):
            load_series(_write(tmp_path, "date,x\n1943-01,1\n1943-02,\n1943-03,3\n"))

    def test_linear_imputation(self, tmp_path):
        X = load_series(_write(tmp_path, "date,x\n1943-01,1\n1943-02,NA\n1943-03,3\n1943-04,\n"), impute="linear")
        np.testing.assert_allclose(X.values[:, 0], [1, 2, 3, 3])

    def test_column_selection(self, tmp_path):
        X = load_series(_write(tmp_path, "date,a,b\n1943-01,1,10\n1943-02,2,20\n"), columns=["b"])
        np.testing.assert_array_equal(X.values[:, 0], [10, 20])

    @pytest.mark.parametrize(
        "text, match",
        [
            ("x,y\n1,2\n3,4\n", "missing column 'date'"),
            ("date,x\n1943-13-40,1\n1943-02,2\n", "row 2"),
            ("date,x\n1943-01,abc\n1943-02,2\n", "unparseable number"),
            ("date,x\n1943-01,1\n", "at least two rows"),
        ],
    )
    def test_malformed(self, tmp_path, text, match):
        with pytest.raises(DataError, match=match):
            load_series(_write(tmp_path, text))

    def test_unknown_imputation_is_config_error(self, tmp_path):
        with pytest.raises(ConfigError):
            load_series(_write(tmp_path, "date,x\n1943-01,1\n1943-02,2\n"), impute="spline")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_series(tmp_path / "absent.csv")

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 3)),
                  elements=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)))
    def test_round_trip(self, tmp_path_factory, values):
        path = tmp_path_factory.mktemp("rt") / "x.csv"
        X = SeriesMatrix(_monthly(values.shape[0]), values, tuple(f"v{j}" for j in range(values.shape[1])))
        write_csv(X, path)
        Y = load_series(path)
        np.testing.assert_array_equal(Y.times, X.times)
        np.testing.assert_allclose(Y.values, X.values, rtol=0, atol=1e-9)


class TestSeriesMatrix:
    def test_immutable(self):
        X = SeriesMatrix(_monthly(3), [1.0, 2.0, 3.0], ("x",))
        with pytest.raises(ValueError):
            X.values[0, 0] = 5.0

    def test_non_increasing_times(self):
        with pytest.raises(DataError, match="strictly increasing"):
            SeriesMatrix(_monthly(3)[::-1], [1.0, 2.0, 3.0], ("x",))

    def test_non_finite(self):
        with pytest.raises(DataError):
            SeriesMatrix(_monthly(2), [1.0, np.nan], ("x",))

    def test_with_column_and_select(self):
        X = SeriesMatrix(_monthly(3), [1.0, 2.0, 3.0], ("x",)).with_column("v", [4.0, 5.0, 6.0])
        assert X.variable_names == ("x", "v")
        np.testing.assert_array_equal(X.select(["v"]).values[:, 0], [4, 5, 6])
        np.testing.assert_array_equal(X.column("v"), [4, 5, 6])


class TestStandardize:
    def test_symmetric_column(self):
        Z = standardize(SeriesMatrix(_monthly(3), [1.0, 2.0, 3.0], ("x",)))
        np.testing.assert_allclose(Z.values[:, 0], [-1, 0, 1], atol=1e-15)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        Z = standardize(SeriesMatrix(_monthly(50), rng.standard_normal((50, 2)) * 7 + 3, ("a", "b")))
        np.testing.assert_allclose(standardize(Z).values, Z.values, atol=1e-12)

    def test_constant_column(self):
        with pytest.raises(DataError, match="zero-variance"):
            standardize(SeriesMatrix(_monthly(3), [2.0, 2.0, 2.0], ("x",)))

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(3, 60), st.integers(1, 3)),
                  elements=st.floats(-1e3, 1e3, allow_nan=False)))
    def test_moments(self, values):
        if np.any(np.ptp(values, axis=0) < 1e-3):
            return
        Z = standardize(SeriesMatrix(_monthly(values.shape[0]), values, tuple(f"v{j}" for j in range(values.shape[1]))))
        assert np.all(np.abs(Z.values.mean(axis=0)) < 1e-12)
        assert np.all(np.abs(Z.values.std(axis=0, ddof=1) - 1) < 1e-12)


class TestDomainTypes:
    def test_regime_names(self):
        assert regime_names(4) == ("low", "moderate", "high", "hyper")
        assert regime_names(6)[5] == "regime5"

    def test_assignment_requires_every_cluster(self):
        with pytest.raises(ValueError):
            RegimeAssignment([0, 0, 2], [0, 0, 2], 3, np.zeros((3, 1)))

    def test_threshold_intervals_closed_below(self):
        ts = ThresholdSet([2.0, 10.0, 50.0])
        np.testing.assert_array_equal(ts.classify([1.99, 2.0, 9.99, 10.0, 50.0, 99.0]), [0, 1, 1, 2, 3, 3])
        assert ts.rows()[0] == {"regime": "low", "min": None, "max": 2.0}

    def test_threshold_must_ascend(self):
        with pytest.raises(ValueError):
            ThresholdSet([5.0, 5.0])

    def test_error_exit_codes(self):
        assert (ConfigError.exit_code, DataError.exit_code, NumericalError.exit_code) == (2, 3, 4)
