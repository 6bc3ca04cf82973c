"""
Tests for the nearest-centroid classifier
"""

import numpy as np
import pytest

from src.coding.classifier import accuracy, fit_centroids, predict, predict_batch
from src.coding.exceptions import DimensionMismatchError, EmptyInputError, NoLabeledSamplesError


class TestFitCentroids:

    def test_class_means(self):
        codes = np.array([[0.0, 2.0, 10.0, 99.0], [0.0, 2.0, 10.0, 99.0]])
        model = fit_centroids(codes, ['b', 'b', 'a', None])
        assert model.classes == ('a', 'b')
        np.testing.assert_allclose(model.centroids, [[10.0, 1.0], [10.0, 1.0]])

    def test_unlabeled_columns_ignored(self, rng):
        codes = rng.standard_normal((3, 4))
        with_extra = np.column_stack([codes, 1e6 * np.ones(3)])
        plain = fit_centroids(codes, ['x', 'y', 'x', 'y'])
        extra = fit_centroids(with_extra, ['x', 'y', 'x', 'y', None])
        np.testing.assert_array_equal(plain.centroids, extra.centroids)

    def test_no_labels(self):
        with pytest.raises(NoLabeledSamplesError):
            fit_centroids(np.zeros((2, 3)), [None, None, None])

    def test_label_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fit_centroids(np.zeros((2, 3)), ['a', 'b'])


class TestPredict:

    def test_nearest_centroid(self):
        model = fit_centroids(np.array([[0.0, 4.0]]), ['near', 'far'])
        assert predict(model, np.array([1.0])) == 'near'
        assert predict(model, np.array([3.5])) == 'far'

    def test_tie_goes_to_first_class(self):
        model = fit_centroids(np.array([[1.0, -1.0]]), ['zeta', 'alpha'])
        assert predict(model, np.array([0.0])) == 'alpha'

    def test_batch(self):
        model = fit_centroids(np.array([[0.0, 4.0]]), ['a', 'b'])
        assert predict_batch(model, np.array([[0.1, 3.9, 2.0]])) == ['a', 'b', 'a']

    def test_wrong_code_length(self):
        model = fit_centroids(np.zeros((2, 2)), ['a', 'b'])
        with pytest.raises(DimensionMismatchError):
            predict(model, np.zeros(3))

    def test_translation_does_not_change_prediction(self, rng):
        for _ in range(200):
            codes = rng.standard_normal((3, 6))
            model = fit_centroids(codes, ['a', 'b', 'c', 'a', 'b', 'c'])
            shift = rng.uniform(-5.0, 5.0, size=(3, 1))
            shifted = fit_centroids(codes + shift, ['a', 'b', 'c', 'a', 'b', 'c'])
            query = rng.standard_normal(3)
            assert predict(shifted, query + shift[:, 0]) == predict(model, query)

    def test_training_codes_recover_separated_classes(self, rng):
        centers = np.array([[5.0, -5.0, 0.0], [0.0, 0.0, 5.0]])
        ids = rng.integers(0, 3, size=30)
        codes = centers[:, ids] + 0.1 * rng.standard_normal((2, 30))
        labels = [f"c{i}" for i in ids]
        model = fit_centroids(codes, labels)
        assert accuracy(predict_batch(model, codes), labels) == 1.0


class TestAccuracy:

    def test_fraction(self):
        assert accuracy(['a', 'b', 'a', 'c'], ['a', 'b', 'b', 'c']) == pytest.approx(0.75)

    def test_pair_order_does_not_matter(self, rng):
        for _ in range(50):
            predicted = list(rng.choice(['a', 'b', 'c'], size=12))
            truth = list(rng.choice(['a', 'b', 'c'], size=12))
            order = rng.permutation(12)
            permuted = accuracy([predicted[i] for i in order], [truth[i] for i in order])
            assert permuted == accuracy(predicted, truth)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            accuracy([], [])

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            accuracy(['a'], ['a', 'b'])
