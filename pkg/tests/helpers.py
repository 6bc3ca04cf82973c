"""
Problem builders shared by the solver tests
"""

import numpy as np

from src.coding.models import CodeProblem


def random_problem(rng, n_features, n_codewords, e=0.0, alpha=None, f_scale=1.0):
    """Random per-sample subproblem"""
    U = rng.standard_normal((n_features, n_codewords))
    x = rng.standard_normal(n_features)
    f = f_scale * rng.standard_normal(n_codewords)
    if alpha is None:
        alpha = float(rng.uniform(0.05, 1.5))
    return CodeProblem(x=x, dictionary=U, e=e, f=f, alpha=alpha)


def orthonormal_columns(rng, n_features, n_codewords):
    Q, _ = np.linalg.qr(rng.standard_normal((n_features, n_codewords)))
    return Q
