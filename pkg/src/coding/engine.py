"""
Training Engine - Core cross-domain sparse coding loop
Alternates Gauss-Seidel code sweeps and codebook updates over

    ||X - U V||^2 + beta Tr(V L V') + gamma ||V pi||^2 + alpha sum_i ||v_i||_1
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .exceptions import CroDomScError, DimensionMismatchError
from .models import (
    CodebookProblem, CodeProblem, Dataset, FitResult, HistoryRecord, Hyperparams, Model,
    SolverSettings, StopReason, TrainHistory
)
from .processor import DatasetProcessor
from .regularizer import build_regularizers, laplacian_term, mmd_term
from .solvers.codebook import CodebookSolver, kkt_residual
from .solvers.feature_sign import FeatureSignSolver

logger = logging.getLogger(__name__)


def objective(X: np.ndarray, U: np.ndarray, V: np.ndarray, L: np.ndarray,
              pi: np.ndarray, hyper: Hyperparams, iteration: int = 0) -> HistoryRecord:
    """Four-term breakdown of the training objective"""
    residual = X - U @ V
    return HistoryRecord(
        iteration=iteration,
        reconstruction=float(np.sum(residual * residual)),
        laplacian=hyper.beta * laplacian_term(V, L) if hyper.beta else 0.0,
        mmd=hyper.gamma * mmd_term(V, pi) if hyper.gamma else 0.0,
        sparsity=hyper.alpha * float(np.abs(V).sum())
    )


def compute_f(i: int, E: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Coupling vector f_i = 2 sum_{j != i} E_ij v_j"""
    if E.shape != (V.shape[1], V.shape[1]):
        raise DimensionMismatchError(f"E has shape {E.shape} but V has {V.shape[1]} columns")
    weights = np.array(E[i], dtype=float)
    weights[i] = 0.0
    return 2.0 * (V @ weights)


def sample_codebook(X: np.ndarray, n_codewords: int, norm_bound: float,
                    rng: np.random.Generator) -> np.ndarray:
    """
    Initial codebook from randomly chosen samples

    K distinct columns of X are drawn without replacement and rescaled to norm
    sqrt(c). When K exceeds the sample count every column is used once in
    shuffled order and the rest are random Gaussian directions. Zero columns
    are also replaced by Gaussian directions.
    """
    D, N = X.shape
    if n_codewords <= N:
        chosen = rng.choice(N, size=n_codewords, replace=False)
        U = np.array(X[:, chosen], dtype=float)
    else:
        logger.warning("K=%d exceeds the %d training samples; padding the codebook "
                       "with random directions", n_codewords, N)
        U = np.empty((D, n_codewords))
        U[:, :N] = X[:, rng.permutation(N)]
        U[:, N:] = rng.standard_normal((D, n_codewords - N))

    norms = np.linalg.norm(U, axis=0)
    for k in np.flatnonzero(norms == 0):
        U[:, k] = rng.standard_normal(D)
    norms = np.linalg.norm(U, axis=0)
    return U * (np.sqrt(norm_bound) / norms)


class CroDomScTrainer:
    """Fits a shared codebook and codes over source and target samples"""

    def __init__(self, hyperparams: Optional[Hyperparams] = None,
                 settings: Optional[SolverSettings] = None):
        self.hyperparams = hyperparams or Hyperparams()
        self.settings = settings or SolverSettings()
        self.code_solver = FeatureSignSolver(self.settings)
        self.codebook_solver = CodebookSolver(self.settings)
        self.processor = DatasetProcessor()

    def _code_sweep(self, X: np.ndarray, U: np.ndarray, V: np.ndarray, E: Optional[np.ndarray],
                    iteration: int) -> bool:
        """Update every column of V in index order, in place; True if any solve used a ridge"""
        K, N = V.shape
        alpha = self.hyperparams.alpha
        zeros = np.zeros(K)
        ridge_triggered = False

        for i in range(N):
            if E is None:
                e, f = 0.0, zeros
            else:
                e, f = E[i, i], compute_f(i, E, V)
            try:
                solution = self.code_solver.solve(CodeProblem(X[:, i], U, e, f, alpha),
                                                  warm_start=V[:, i])
            except CroDomScError as exc:
                raise type(exc)(f"iteration {iteration}, sample {i}: {exc}") from exc
            V[:, i] = solution.v
            ridge_triggered = ridge_triggered or solution.ridge_triggered
        return ridge_triggered

    def _update_codebook(self, X: np.ndarray, V: np.ndarray, U: np.ndarray,
                         iteration: int) -> np.ndarray:
        try:
            return self.codebook_solver.solve(
                CodebookProblem(X, V, self.hyperparams.norm_bound, initial=U))
        except CroDomScError as exc:
            raise type(exc)(f"iteration {iteration}, codebook update: {exc}") from exc

    def initialize(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Plain sparse coding start point

        Returns:
            (U0, V0): the sampled codebook and the codes after the warm-up
            sweeps (code update, then codebook update, with no coupling)
        """
        X = np.asarray(X, dtype=float)
        hyper = self.hyperparams
        rng = np.random.default_rng(hyper.seed)

        U0 = sample_codebook(X, hyper.n_codewords, hyper.norm_bound, rng)
        U = U0.copy()
        V = np.zeros((hyper.n_codewords, X.shape[1]))
        for sweep in range(1, self.settings.warmup_sweeps + 1):
            self._code_sweep(X, U, V, None, iteration=0)
            U = self._update_codebook(X, V, U, iteration=0)
            logger.debug("Warm-up sweep %d done", sweep)
        return U0, V

    def fit(self, dataset: Dataset) -> FitResult:
        """
        Train on a validated dataset

        Args:
            dataset: Training samples with domain tags and labels

        Returns:
            FitResult with the trained model, codes, per-iteration history
            and the regularizers used
        """
        self.processor.require_valid(dataset)
        hyper = self.hyperparams
        X = dataset.features
        bundle = build_regularizers(dataset, hyper)
        E = bundle.E

        U, V = self.initialize(X)
        V = V.copy()

        history = TrainHistory()
        history.append(objective(X, U, V, bundle.laplacian, bundle.pi, hyper, iteration=0))
        previous = history[0].total
        stop_reason = StopReason.MAX_ITERS

        for iteration in range(1, hyper.max_iter + 1):
            ridge_triggered = self._code_sweep(X, U, V, E, iteration)
            U = self._update_codebook(X, V, U, iteration)

            record = objective(X, U, V, bundle.laplacian, bundle.pi, hyper, iteration=iteration)
            record.ridge_triggered = ridge_triggered
            record.kkt_residual = kkt_residual(X, V, U, hyper.norm_bound)
            record.relative_change = abs(record.total - previous) / max(1.0, previous)
            history.append(record)

            logger.info("Iteration %d: objective %.6g (relative change %.3g)",
                        iteration, record.total, record.relative_change)
            if ridge_triggered:
                logger.debug("Iteration %d used the ridge safeguard", iteration)

            if record.relative_change < hyper.tol:
                stop_reason = StopReason.CONVERGED
                break
            previous = record.total

        logger.info("Training stopped after %d iterations: %s",
                    len(history) - 1, stop_reason.value)
        return FitResult(
            model=Model(U, hyper),
            codes=V,
            history=history,
            stop_reason=stop_reason,
            regularizers=bundle
        )


def init_model(X: np.ndarray, hyper: Hyperparams,
               settings: Optional[SolverSettings] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Sampled codebook U0 and warm-up codes V0 for a feature matrix"""
    return CroDomScTrainer(hyper, settings).initialize(X)


def fit(dataset: Dataset, hyper: Hyperparams,
        settings: Optional[SolverSettings] = None) -> FitResult:
    """Train cross-domain sparse coding on a dataset"""
    return CroDomScTrainer(hyper, settings).fit(dataset)
