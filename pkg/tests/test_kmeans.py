import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datasets import blobs
from oracles import best_partition_enumeration, same_partition
from regimekit import _backend
from regimekit.core import ConfigError, DataError
from regimekit.kmeans import DEFAULT_K, DEFAULT_MAX_ITER, DEFAULT_RESTARTS, kmeans, kmeans_plusplus, order_regimes


def _wss(X, labels):
    return sum(float(((X[labels == c] - X[labels == c].mean(axis=0)) ** 2).sum()) for c in np.unique(labels))


class TestForcedSolutions:
    def test_single_cluster(self):
        X = np.random.default_rng(0).standard_normal((30, 2))
        res = kmeans(X, 1, restarts=2)
        np.testing.assert_allclose(res.assignment.centers[0], X.mean(axis=0), atol=1e-12)
        assert res.wss == pytest.approx(((X - X.mean(axis=0)) ** 2).sum(), rel=1e-12)
        assert res.assignment.regime_labels()[0] == "low"

    def test_each_point_its_own_cluster(self):
        X = np.arange(7, dtype=float)[:, None] ** 2
        res = kmeans(X, 7, restarts=3)
        assert res.wss == 0.0
        assert np.unique(res.labels).size == 7

    def test_too_few_distinct_rows(self):
        with pytest.raises(DataError):
            kmeans(np.array([[1.0], [1.0], [2.0]]), 3)

    @pytest.mark.parametrize("kwargs", [{"k": 0}, {"k": 50}, {"restarts": 0}])
    def test_config_errors(self, kwargs):
        with pytest.raises(ConfigError):
            kmeans(np.random.default_rng(0).standard_normal((10, 1)), **{"k": 2, **kwargs})


class TestBlobs:
    def test_three_blobs_match_enumeration(self):
        X, member = blobs([0.0, 20.0, 40.0], 20, 0.5, seed=11)
        res = kmeans(X, 3)
        assert same_partition(res.labels, member)
        # exhaustive 3-partition search on a 12-point subsample
        rng = np.random.default_rng(12)
        idx = np.sort(np.concatenate([rng.choice(np.flatnonzero(member == c), 4, replace=False) for c in range(3)]))
        w_best, lab_best = best_partition_enumeration(X[idx], 3)
        sub = kmeans(X[idx], 3)
        assert sub.wss == pytest.approx(w_best, rel=1e-12)
        assert same_partition(sub.labels, lab_best)
        assert same_partition(lab_best, member[idx])

    def test_small_random_sets_reach_global_optimum(self):
        for seed in range(5):
            X = np.random.default_rng(seed).standard_normal((9, 1))
            w_best, _ = best_partition_enumeration(X, 3)
            assert kmeans(X, 3).wss == pytest.approx(w_best, rel=1e-12)


class TestDeterminism:
    def test_same_seed_same_result(self):
        X = np.random.default_rng(4).standard_normal((80, 2))
        a, b = kmeans(X, 4, seed=9), kmeans(X, 4, seed=9)
        np.testing.assert_array_equal(a.labels, b.labels)
        assert a.wss == b.wss

    def test_reported_configuration(self):
        res = kmeans(np.random.default_rng(4).standard_normal((20, 1)), seed=3)
        doc = json.loads(res.to_json())
        assert doc["seed"] == 3 and doc["restarts"] == DEFAULT_RESTARTS and doc["max_iter"] == DEFAULT_MAX_ITER
        assert res.assignment.k == DEFAULT_K
        assert {"centers", "labels", "wss", "iterations", "seed"} <= set(doc)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-np.pi, np.pi), st.floats(-50, 50))
    def test_rigid_motion_invariance(self, seed, angle, shift):
        X, _ = blobs(np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]]), 15, 0.6, seed, dim=2)
        R = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        a = kmeans(X, 3, seed=seed)
        b = kmeans(X @ R.T + shift, 3, seed=seed)
        assert same_partition(a.labels, b.labels)
        assert b.wss == pytest.approx(a.wss, rel=1e-9)


class TestLloyd:
    def test_wss_matches_labels(self):
        X = np.random.default_rng(8).standard_normal((50, 2))
        res = kmeans(X, 4)
        assert res.wss == pytest.approx(_wss(X, res.labels), rel=1e-12)

    def test_wss_non_increasing_over_iterations(self):
        X = np.random.default_rng(8).standard_normal((60, 2))
        init = kmeans_plusplus(X, 4, np.random.default_rng(0))
        history = [_backend.lloyd(X, init, it)[2] for it in range(1, 12)]
        assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))

    def test_fixpoint(self):
        X = np.random.default_rng(8).standard_normal((60, 2))
        labels, centers, _, _ = _backend.lloyd(X, kmeans_plusplus(X, 3, np.random.default_rng(1)), 300)
        nearest = np.argmin(((X[:, None, :] - centers[None]) ** 2).sum(axis=2), axis=1)
        np.testing.assert_array_equal(labels, nearest)

    def test_plusplus_picks_data_points(self):
        X = np.random.default_rng(3).standard_normal((25, 2))
        init = kmeans_plusplus(X, 5, np.random.default_rng(0))
        assert all(any(np.array_equal(c, x) for x in X) for c in init)
        assert np.unique(init, axis=0).shape[0] == 5


class TestOrdering:
    def test_regime_order_by_mean(self):
        centers_means = [24.3, 1.36, 112.86, 8.66]
        X, member = blobs(centers_means, 10, 0.01, seed=0)
        res = kmeans(X, 4)
        means = [X[res.assignment.regime_of == r, 0].mean() for r in range(4)]
        np.testing.assert_allclose(means, [1.36, 8.66, 24.3, 112.86], atol=0.05)
        names = res.assignment.regime_labels()
        assert names[int(np.flatnonzero(member == 2)[0])] == "hyper"
        assert names[int(np.flatnonzero(member == 1)[0])] == "low"

    def test_order_regimes_by_other_matrix(self):
        X = np.random.default_rng(2).standard_normal((40, 2))
        res = kmeans(X, 3)
        key = -X
        ra = order_regimes(res, key)
        means = [key[ra.regime_of == r, 0].mean() for r in range(3)]
        assert means == sorted(means)

    def test_tie_lower_cluster_first(self):
        # both clusters have first-variable mean 0; the second column separates them
        X = np.array([[-1.0, 0.0], [1.0, 0.0], [-1.0, 10.0], [1.0, 10.0]])
        res = kmeans(X, 2)
        np.testing.assert_array_equal(res.assignment.regime_of, res.assignment.cluster_of)
