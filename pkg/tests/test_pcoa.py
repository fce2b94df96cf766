import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import distances_of
from regimekit.core import ConfigError, DataError
from regimekit.dct import dct_matrix, euclidean_matrix
from regimekit.pcoa import Embedding, embedding_stress, pcoa_embed, write_embedding


class TestPcoaEmbed:
    def test_three_collinear_points(self):
        D = euclidean_matrix(np.array([[0.0], [1.0], [2.0]]))
        E = pcoa_embed(D, 1)
        np.testing.assert_allclose(distances_of(E.coords), D.d, atol=1e-10)

    def test_all_zero_matrix(self):
        with pytest.warns(RuntimeWarning):
            E = pcoa_embed(np.zeros((4, 4)), 2)
        assert E.retained == 0
        np.testing.assert_array_equal(E.coords, 0.0)

    def test_random_configuration(self):
        X = np.random.default_rng(5).standard_normal((20, 3))
        D = euclidean_matrix(X)
        E = pcoa_embed(D, 3)
        np.testing.assert_allclose(distances_of(E.coords), D.d, atol=1e-8)
        assert E.retained == 3
        assert E.negative_mass == 0.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(4, 25), st.integers(1, 3))
    def test_euclidean_exactness(self, seed, T, p):
        X = np.random.default_rng(seed).standard_normal((T, p)) * 10
        D = euclidean_matrix(X)
        E = pcoa_embed(D, p)
        np.testing.assert_allclose(distances_of(E.coords), D.d, atol=1e-8)

    def test_eigenvalues_descending(self):
        D = dct_matrix(np.random.default_rng(1).standard_normal((30, 2)), 0.5)
        E = pcoa_embed(D, 2)
        assert np.all(np.diff(E.eigenvalues) <= 0)

    def test_dct_negative_eigenvalues_are_reported(self):
        # DCT is not a metric, so the double-centred matrix is generally indefinite
        D = dct_matrix(np.random.default_rng(2).standard_normal((40, 1)), 5.0)
        E = pcoa_embed(D, 1)
        assert E.negative_mass > 0
        assert np.all(E.eigenvalues[E.eigenvalues < 0] < 0)

    def test_deterministic_sign(self):
        D = euclidean_matrix(np.random.default_rng(3).standard_normal((12, 2)))
        a, b = pcoa_embed(D, 2), pcoa_embed(D, 2)
        np.testing.assert_array_equal(a.coords, b.coords)

    @pytest.mark.parametrize("p", [0, 10])
    def test_dimension_range(self, p):
        with pytest.raises(ConfigError):
            pcoa_embed(np.zeros((10, 10)), p)

    def test_rejects_asymmetric(self):
        with pytest.raises(DataError):
            pcoa_embed(np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]]), 1)


class TestStress:
    def test_exact_reconstruction(self):
        D = euclidean_matrix(np.random.default_rng(4).standard_normal((15, 2)))
        assert embedding_stress(D, pcoa_embed(D, 2)) < 1e-8

    def test_zero_coordinates(self):
        D = euclidean_matrix(np.random.default_rng(4).standard_normal((6, 2)))
        E = Embedding(np.zeros((6, 2)), np.zeros(6), 0, 0.0)
        assert embedding_stress(D, E) == pytest.approx(1.0)

    def test_more_dimensions_lower_stress(self):
        D = dct_matrix(np.random.default_rng(6).standard_normal((40, 2)), 0.1)
        assert embedding_stress(D, pcoa_embed(D, 2)) < embedding_stress(D, pcoa_embed(D, 1))

    def test_all_zero_dissimilarity(self):
        with pytest.raises(DataError):
            embedding_stress(np.zeros((3, 3)), Embedding(np.zeros((3, 1)), np.zeros(3), 0, 0.0))


def test_write_embedding(tmp_path):
    X = np.random.default_rng(0).standard_normal((5, 2))
    E = pcoa_embed(euclidean_matrix(X), 2)
    times = np.datetime64("2000-01", "M") + np.arange(5)
    write_embedding(E, times, tmp_path / "e.csv", tmp_path / "ev.json")
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "date,pc1,pc2" and lines[1].startswith("2000-01,")
    assert json.loads((tmp_path / "ev.json").read_text()) == pytest.approx(E.eigenvalues.tolist())
