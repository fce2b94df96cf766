import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datasets import interval_labels
from oracles import best_midpoint, gini, recursive_cuts
from regimekit.cart import best_split, fit_thresholds, grow_tree, thresholds_to_json
from regimekit.core import DataError, RegimeAssignment


class TestBestSplit:
    def test_two_classes(self):
        x = np.array([1.0, 2.0, 3.0, 10.0, 11.0, 12.0])
        cut, pos, score = best_split(x, np.array([0, 0, 0, 1, 1, 1]), 2)
        assert (cut, pos, score) == (6.5, 3, 0.0)

    def test_constant_x(self):
        assert best_split(np.ones(4), np.array([0, 1, 0, 1]), 2) is None

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 2)), min_size=2, max_size=40))
    def test_matches_exhaustive_scan(self, pairs):
        pairs.sort()
        x = np.array([p[0] for p in pairs], dtype=float)
        y = np.array([p[1] for p in pairs])
        if np.unique(x).size < 2:
            return
        cut, _, score = best_split(x, y, 3)
        ref_cut, ref_score = best_midpoint(x.tolist(), y.tolist())
        assert cut == ref_cut
        assert score == pytest.approx(ref_score, abs=1e-9)

    def test_score_is_weighted_gini(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        y = np.array([0, 1, 0, 1, 1])
        cut, pos, score = best_split(x, y, 2)
        left, right = y[:pos].tolist(), y[pos:].tolist()
        assert score == pytest.approx(len(left) * gini(left) + len(right) * gini(right))


class TestFitThresholds:
    def test_example(self):
        ts = fit_thresholds([1, 2, 3, 10, 11, 12], ["A", "A", "A", "B", "B", "B"])
        np.testing.assert_array_equal(ts.cuts, [6.5])
        assert ts.purity == 1.0
        assert ts.names == ("A", "B")

    def test_single_label(self):
        ts = fit_thresholds([1.0, 2.0, 3.0], [0, 0, 0])
        assert ts.cuts.size == 0

    def test_label_order_follows_means(self):
        ts = fit_thresholds([10, 11, 1, 2, 30, 31], ["mid", "mid", "lo", "lo", "hi", "hi"])
        assert ts.names == ("lo", "mid", "hi")
        np.testing.assert_array_equal(ts.cuts, [6.0, 20.5])

    def test_regime_assignment_input(self):
        x = np.array([1.0, 1.2, 5.0, 5.1, 9.0])
        ra = RegimeAssignment([2, 2, 0, 0, 1], [0, 0, 1, 1, 2], 3, np.zeros((3, 1)))
        ts = fit_thresholds(x, ra)
        np.testing.assert_allclose(ts.cuts, [3.1, 7.05])
        assert ts.names == ("low", "moderate", "high")

    def test_non_separable_reports_purity(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        y = np.array([0, 0, 1, 0, 1, 1])
        ts = fit_thresholds(x, y)
        assert ts.cuts.size == 1
        assert ts.purity == pytest.approx(5 / 6)

    def test_too_few_distinct_values(self):
        with pytest.raises(DataError):
            fit_thresholds([1.0, 1.0, 2.0], [0, 1, 2])

    def test_expected_k_mismatch(self):
        with pytest.raises(DataError):
            fit_thresholds([1.0, 2.0, 3.0], [0, 0, 1], k=3)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_oracle_and_intervals(self, seed):
        x, y, k = interval_labels(seed)
        ts = fit_thresholds(x, y)
        assert ts.cuts.tolist() == recursive_cuts(x.tolist(), y.tolist())
        assert ts.purity == 1.0
        np.testing.assert_array_equal(ts.classify(x), y)
        assert np.all(np.diff(ts.cuts) > 0)


def test_tree_accuracy_on_separable_labels():
    x, y, k = interval_labels(7, T=50, k=4)
    tree = grow_tree(x, y, k)

    def predict(node, v):
        while hasattr(node, "cut"):
            node = node.left if v <= node.cut else node.right
        return node.label

    assert all(predict(tree, v) == lab for v, lab in zip(x, y))
    assert tree.impurity_decrease > 0


def test_json_rows(tmp_path):
    ts = fit_thresholds([1.0, 2.0, 8.0, 9.0, 50.0], [0, 0, 1, 1, 2])
    thresholds_to_json(ts, tmp_path / "t.json", counts=[2, 2, 1], means=[1.5, 8.5, 50.0])
    doc = json.loads((tmp_path / "t.json").read_text())
    rows = doc["thresholds"]
    assert rows[0] == {"regime": "0", "min": None, "max": 5.0, "observations": 2, "mean": 1.5}
    assert rows[2]["min"] == 29.5 and rows[2]["max"] is None
