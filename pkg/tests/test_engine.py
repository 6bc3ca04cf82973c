"""
Tests for the training loop
"""

import logging
import math

import numpy as np
import pytest

from src.coding.engine import CroDomScTrainer, compute_f, fit, init_model, objective, sample_codebook
from src.coding.exceptions import DatasetValidationError, NonConvexSubproblemError
from src.coding.models import (
    CodebookProblem, CodeProblem, Dataset, Hyperparams, LaplacianKind, StopReason
)
from src.coding.regularizer import build_domain_indicator, build_regularizers, mmd_term
from src.coding.solvers.codebook import update_codebook
from src.coding.solvers.feature_sign import code_objective, solve_code
from utils.sample_data import SynthConfig, generate

SEEDS = range(10)


def synthetic(seed, **changes):
    return generate(SynthConfig(seed=seed, **changes))


def class_distance_ratio(codes, labels):
    """Mean intra-class over mean inter-class code distance among labeled samples"""
    labeled = [i for i, label in enumerate(labels) if label is not None]
    intra, inter = [], []
    for a, i in enumerate(labeled):
        for j in labeled[a + 1:]:
            distance = np.linalg.norm(codes[:, i] - codes[:, j])
            (intra if labels[i] == labels[j] else inter).append(distance)
    return np.mean(intra) / np.mean(inter)


class TestObjective:

    def test_zero_codes(self, rng):
        X = rng.standard_normal((4, 6))
        pi = build_domain_indicator(['S'] * 3 + ['T'] * 3)
        record = objective(X, rng.standard_normal((4, 2)), np.zeros((2, 6)), np.eye(6), pi,
                           Hyperparams(n_codewords=2))
        assert record.reconstruction == pytest.approx(np.sum(X ** 2))
        assert (record.laplacian, record.mmd, record.sparsity) == (0.0, 0.0, 0.0)

    def test_exact_reconstruction(self, rng):
        U = rng.standard_normal((4, 3))
        V = rng.standard_normal((3, 5))
        pi = build_domain_indicator(['S', 'S', 'T', 'T', 'T'])
        record = objective(U @ V, U, V, np.eye(5), pi,
                           Hyperparams(n_codewords=3, beta=0.0, gamma=0.0))
        assert record.reconstruction == pytest.approx(0.0, abs=1e-20)
        assert record.laplacian == 0.0 and record.mmd == 0.0
        assert record.total == pytest.approx(record.sparsity)

    def test_componentwise_example(self):
        hyper = Hyperparams(n_codewords=2, alpha=1.0, beta=0.0, gamma=1.0)
        record = objective(np.eye(2), np.eye(2), np.eye(2), np.zeros((2, 2)),
                           np.array([1.0, -1.0]), hyper)
        assert (record.reconstruction, record.laplacian, record.mmd, record.sparsity) == (0.0, 0.0, 2.0, 2.0)
        assert record.total == 4.0


class TestCouplingVector:

    def test_off_diagonal_example(self):
        E = np.array([[0.0, 1.0], [1.0, 0.0]])
        V = np.array([[5.0, 1.0], [7.0, 2.0]])
        np.testing.assert_array_equal(compute_f(0, E, V), [2.0, 4.0])

    def test_diagonal_E(self, rng):
        V = rng.standard_normal((3, 4))
        E = np.diag(rng.standard_normal(4))
        for i in range(4):
            np.testing.assert_array_equal(compute_f(i, E, V), np.zeros(3))

    def test_zero_E(self, rng):
        np.testing.assert_array_equal(compute_f(1, np.zeros((3, 3)), rng.standard_normal((2, 3))),
                                      np.zeros(2))

    def test_sample_update_is_restriction_of_full_objective(self, tiny_dataset, rng):
        hyper = Hyperparams(n_codewords=2, alpha=0.3, beta=0.8, gamma=1.7)
        bundle = build_regularizers(tiny_dataset, hyper)
        X = tiny_dataset.features
        U = rng.standard_normal((3, 2))
        V = rng.standard_normal((2, 4))
        for i in range(4):
            problem = CodeProblem(X[:, i], U, bundle.E[i, i], compute_f(i, bundle.E, V), hyper.alpha)
            a, b = rng.standard_normal(2), rng.standard_normal(2)
            V_a, V_b = V.copy(), V.copy()
            V_a[:, i], V_b[:, i] = a, b
            full_a = objective(X, U, V_a, bundle.laplacian, bundle.pi, hyper).total
            full_b = objective(X, U, V_b, bundle.laplacian, bundle.pi, hyper).total
            local = code_objective(problem, a) - code_objective(problem, b)
            assert full_a - full_b == pytest.approx(local, rel=1e-9, abs=1e-9)


class TestInitialization:

    def test_codewords_rescaled(self, rng):
        X = rng.standard_normal((5, 12))
        U = sample_codebook(X, 6, 2.5, rng)
        np.testing.assert_allclose(np.sum(U ** 2, axis=0), 2.5, atol=1e-10)

    def test_distinct_columns(self, rng):
        X = rng.standard_normal((5, 12))
        U = sample_codebook(X, 12, 1.0, rng)
        directions = X / np.linalg.norm(X, axis=0)
        matches = [int(np.argmin(np.linalg.norm(directions - U[:, [k]], axis=0))) for k in range(12)]
        assert sorted(matches) == list(range(12))

    def test_more_codewords_than_samples_warns(self, rng, caplog):
        X = rng.standard_normal((4, 3))
        with caplog.at_level(logging.WARNING, logger='src.coding.engine'):
            U = sample_codebook(X, 5, 1.0, rng)
        assert U.shape == (4, 5)
        assert 'exceeds' in caplog.text
        np.testing.assert_allclose(np.sum(U ** 2, axis=0), 1.0, atol=1e-10)

    def test_deterministic(self, synth_default):
        train, _, _ = synth_default
        hyper = Hyperparams(n_codewords=15, seed=3)
        U_a, V_a = init_model(train.features, hyper)
        U_b, V_b = init_model(train.features, hyper)
        np.testing.assert_array_equal(U_a, U_b)
        np.testing.assert_array_equal(V_a, V_b)

    def test_norms_equal_bound(self, synth_default):
        train, _, _ = synth_default
        U, V = init_model(train.features, Hyperparams(n_codewords=15, norm_bound=0.5))
        np.testing.assert_allclose(np.sum(U ** 2, axis=0), 0.5, atol=1e-10)
        assert V.shape == (15, train.n_samples)

    def test_orthonormal_samples_give_permutation(self):
        X = np.eye(4)
        U, _ = init_model(X, Hyperparams(n_codewords=4, alpha=0.01))
        assert sorted(np.argmax(np.abs(U), axis=0).tolist()) == [0, 1, 2, 3]
        np.testing.assert_allclose(np.sort(np.abs(U), axis=0), np.sort(X, axis=0))


class TestFit:

    def test_infinite_tolerance_stops_after_one_iteration(self, synth_default):
        train, _, _ = synth_default
        result = fit(train, Hyperparams(n_codewords=15, max_iter=10, tol=math.inf))
        assert result.stop_reason is StopReason.CONVERGED
        assert len(result.history) == 2

    def test_zero_tolerance_runs_all_iterations(self, synth_default):
        train, _, _ = synth_default
        result = fit(train, Hyperparams(n_codewords=15, max_iter=4, tol=0.0))
        assert result.stop_reason is StopReason.MAX_ITERS
        assert len(result.history) == 5
        assert [r.iteration for r in result.history] == [0, 1, 2, 3, 4]

    def test_history_parts_sum_to_totals(self, synth_default):
        train, _, _ = synth_default
        result = fit(train, Hyperparams(n_codewords=15, max_iter=5))
        frame = result.history.to_dataframe()
        parts = frame[['reconstruction', 'laplacian', 'mmd', 'sparsity']].sum(axis=1)
        np.testing.assert_allclose(frame['total'], parts, rtol=1e-9)
        assert len(result.history) <= 6
        assert result.history[0].kkt_residual is None

    def test_monotone_feasible_and_stationary(self, synth_hyper):
        for seed in SEEDS:
            train, _, _ = synthetic(seed)
            result = fit(train, synth_hyper.with_updates(seed=seed))
            assert result.history.is_monotone(slack=1e-6), f"seed {seed}"
            assert len(result.history) == synth_hyper.max_iter + 1
            for record in list(result.history)[1:]:
                assert record.kkt_residual <= 1e-5, f"seed {seed}, iteration {record.iteration}"
            norms = np.sum(result.model.codebook ** 2, axis=0)
            assert np.all(norms <= synth_hyper.norm_bound + 1e-8)

    def test_no_regularizers_is_plain_sparse_coding(self, synth_default):
        train, _, _ = synth_default
        hyper = Hyperparams(n_codewords=15, beta=0.0, gamma=0.0, max_iter=10, tol=0.0, seed=1)
        result = fit(train, hyper)

        X = train.features
        U, V = init_model(X, hyper)
        V = V.copy()
        pi = build_domain_indicator(train.domains)
        totals = [objective(X, U, V, np.zeros((60, 60)), pi, hyper).total]
        for _ in range(hyper.max_iter):
            for i in range(X.shape[1]):
                problem = CodeProblem(X[:, i], U, 0.0, np.zeros(15), hyper.alpha)
                V[:, i] = solve_code(problem, warm_start=V[:, i]).v
            U = update_codebook(CodebookProblem(X, V, hyper.norm_bound, initial=U))
            residual = X - U @ V
            totals.append(float(np.sum(residual ** 2)) + hyper.alpha * float(np.abs(V).sum()))

        np.testing.assert_allclose(result.history.totals, totals, rtol=1e-6, atol=1e-6)

    def test_mmd_weight_shrinks_domain_gap(self):
        wins = 0
        for seed in SEEDS:
            train, _, _ = synthetic(seed, shift=2.0, noise=0.1)
            base = Hyperparams(n_codewords=15, beta=0.0, max_iter=30, tol=0.0, seed=seed)
            with_mmd = fit(train, base.with_updates(gamma=1.0))
            without = fit(train, base.with_updates(gamma=0.0))
            pi = with_mmd.regularizers.pi
            wins += mmd_term(with_mmd.codes, pi) < mmd_term(without.codes, pi)
        assert wins >= 9

    def test_label_weight_tightens_classes(self):
        wins = 0
        for seed in SEEDS:
            train, _, _ = synthetic(seed)
            base = Hyperparams(n_codewords=15, gamma=0.0, max_iter=30, tol=0.0, seed=seed)
            with_labels = fit(train, base.with_updates(beta=1.0))
            without = fit(train, base.with_updates(beta=0.0))
            wins += (class_distance_ratio(with_labels.codes, train.labels)
                     < class_distance_ratio(without.codes, train.labels))
        assert wins >= 8

    def test_deterministic(self, synth_default):
        train, _, _ = synth_default
        hyper = Hyperparams(n_codewords=15, max_iter=5)
        first, second = fit(train, hyper), fit(train, hyper)
        assert len(first.history) == len(second.history)
        np.testing.assert_allclose(first.history.totals, second.history.totals, rtol=0, atol=1e-12)
        np.testing.assert_array_equal(first.codes, second.codes)

    def test_signed_laplacian_reports_nonconvex_sample(self, synth_default):
        train, _, _ = synth_default
        hyper = Hyperparams(n_codewords=15, beta=1.0, laplacian=LaplacianKind.SIGNED, max_iter=3)
        with pytest.raises(NonConvexSubproblemError, match='iteration 1, sample'):
            fit(train, hyper)

    def test_more_codewords_than_samples(self, tiny_dataset):
        result = fit(tiny_dataset, Hyperparams(n_codewords=6, max_iter=3))
        assert result.model.codebook.shape == (3, 6)
        assert result.codes.shape == (6, 4)

    def test_invalid_dataset_rejected(self):
        dataset = Dataset(np.ones((2, 3)), ('T', 'T', 'T'), (None, None, None))
        with pytest.raises(DatasetValidationError):
            fit(dataset, Hyperparams(n_codewords=2))

    def test_trainer_logs_iterations(self, tiny_dataset, caplog):
        with caplog.at_level(logging.INFO, logger='src.coding.engine'):
            CroDomScTrainer(Hyperparams(n_codewords=2, max_iter=2, tol=0.0)).fit(tiny_dataset)
        assert 'Iteration 1' in caplog.text
        assert 'max_iters' in caplog.text
