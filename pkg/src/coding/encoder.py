"""
Test-time coding of unseen samples against a trained codebook
"""

from typing import Optional

import numpy as np

from .exceptions import DimensionMismatchError
from .models import CodeProblem, Model, SolverSettings
from .solvers.feature_sign import FeatureSignSolver


class Encoder:
    """Plain L1 coding (no label or domain coupling) with the model's alpha"""

    def __init__(self, model: Model, settings: Optional[SolverSettings] = None):
        self.model = model
        self.solver = FeatureSignSolver(settings)
        self._zeros = np.zeros(model.n_codewords)

    def encode(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.model.n_features,):
            raise DimensionMismatchError(
                f"sample has shape {x.shape}, model expects ({self.model.n_features},)")
        problem = CodeProblem(x, self.model.codebook, 0.0, self._zeros,
                              self.model.hyperparams.alpha)
        return self.solver.solve(problem).v

    def encode_batch(self, X: np.ndarray) -> np.ndarray:
        """Encode every column of a D x M matrix; returns K x M"""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != self.model.n_features:
            raise DimensionMismatchError(
                f"batch has shape {X.shape}, model expects {self.model.n_features} rows")
        codes = np.zeros((self.model.n_codewords, X.shape[1]))
        for j in range(X.shape[1]):
            codes[:, j] = self.encode(X[:, j])
        return codes


def encode(x: np.ndarray, model: Model, settings: Optional[SolverSettings] = None) -> np.ndarray:
    return Encoder(model, settings).encode(x)


def encode_batch(X: np.ndarray, model: Model,
                 settings: Optional[SolverSettings] = None) -> np.ndarray:
    return Encoder(model, settings).encode_batch(X)
