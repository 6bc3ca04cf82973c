"""
Codebook Update
Norm-constrained least squares min_U ||X - U V||^2 s.t. ||u_k||^2 <= c,
solved by projected block coordinate descent over the columns of U.
"""

import logging
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize

from ..exceptions import DimensionMismatchError, NonFiniteError
from ..models import CodebookProblem, SolverSettings

logger = logging.getLogger(__name__)

# Columns with ||u_k||^2 >= c - BOUNDARY_SLACK are treated as on the constraint
BOUNDARY_SLACK = 1e-8


def reconstruction_error(X: np.ndarray, U: np.ndarray, V: np.ndarray) -> float:
    """||X - U V||^2"""
    residual = X - U @ V
    return float(np.sum(residual * residual))


def project_columns(U: np.ndarray, norm_bound: float) -> np.ndarray:
    """Scale every column with ||u_k||^2 > c back onto the ball of radius sqrt(c)"""
    U = np.array(U, dtype=float)
    norms = np.linalg.norm(U, axis=0)
    radius = np.sqrt(norm_bound)
    outside = norms > radius
    U[:, outside] *= radius / norms[outside]
    return U


class CodebookSolver:
    """
    Projected column-wise block coordinate descent

    Sweeps start from the better of the warm start and the dual start point
    (the Lagrange-dual minimizer U = H (G + diag(lambda))^-1 over the columns
    with a nonzero code row), so they only need to polish.
    """

    def __init__(self, settings: Optional[SolverSettings] = None):
        self.settings = settings or SolverSettings()
        self.last_sweeps = 0

    def _dual_start(self, G: np.ndarray, H: np.ndarray, base: np.ndarray,
                    norm_bound: float) -> Optional[np.ndarray]:
        """Closed-form start when feasible, Lagrange-dual start otherwise; None if G is singular"""
        used = np.flatnonzero(np.diag(G) > 0)
        if used.size == 0:
            return None
        G_used = G[np.ix_(used, used)]
        H_used = H[:, used]

        def columns(lam: np.ndarray) -> np.ndarray:
            factor = cho_factor(G_used + np.diag(lam), lower=True, check_finite=False)
            return cho_solve(factor, H_used.T, check_finite=False).T

        try:
            candidate = columns(np.zeros(used.size))
        except LinAlgError:
            return None

        if np.any(np.sum(candidate ** 2, axis=0) > norm_bound):
            def negative_dual(lam):
                try:
                    U_lam = columns(lam)
                except LinAlgError:
                    return np.inf, np.zeros_like(lam)
                value = float(np.sum(U_lam * H_used)) + norm_bound * float(lam.sum())
                gradient = norm_bound - np.sum(U_lam ** 2, axis=0)
                return value, gradient

            result = minimize(negative_dual, np.zeros(used.size), jac=True, method='L-BFGS-B',
                              bounds=[(0.0, None)] * used.size,
                              options={'maxiter': 500, 'ftol': 1e-15, 'gtol': 1e-12})
            candidate = columns(result.x)
            logger.debug("Dual start after %d L-BFGS-B iterations", result.nit)

        start = base.copy()
        start[:, used] = candidate
        return project_columns(start, norm_bound)

    def solve(self, problem: CodebookProblem) -> np.ndarray:
        """
        Update the codebook

        Columns are visited in order; each gets its exact least-squares minimizer
        with the other columns fixed, then is projected onto the norm ball.
        A column whose code row is all zeros keeps its warm-start value.

        Returns:
            D x K codebook satisfying ||u_k||^2 <= c
        """
        X, V = problem.X, problem.V
        D = X.shape[0]
        K = problem.n_codewords

        if not np.any(X):
            self.last_sweeps = 0
            return np.zeros((D, K))

        if problem.initial is None:
            U = np.zeros((D, K))
        else:
            U = project_columns(problem.initial, problem.norm_bound)

        G = V @ V.T
        H = X @ V.T
        radius = np.sqrt(problem.norm_bound)

        start = self._dual_start(G, H, U, problem.norm_bound)
        if start is not None and reconstruction_error(X, start, V) <= reconstruction_error(X, U, V):
            U = start

        sweep = 0
        for sweep in range(1, self.settings.codebook_max_sweeps + 1):
            max_change = 0.0
            for k in range(K):
                g_kk = G[k, k]
                if g_kk <= 0:
                    continue
                column = U[:, k] + (H[:, k] - U @ G[:, k]) / g_kk
                norm = np.linalg.norm(column)
                if norm > radius:
                    column *= radius / norm
                max_change = max(max_change, float(np.linalg.norm(column - U[:, k])))
                U[:, k] = column
            if max_change < self.settings.codebook_tolerance:
                break
        else:
            logger.debug("Codebook update stopped at the sweep cap (%d)",
                         self.settings.codebook_max_sweeps)

        self.last_sweeps = sweep
        if not np.all(np.isfinite(U)):
            raise NonFiniteError("codebook update produced non-finite entries")
        return U


def update_codebook(problem: CodebookProblem,
                    settings: Optional[SolverSettings] = None) -> np.ndarray:
    """Solve the constrained codebook problem"""
    return CodebookSolver(settings).solve(problem)


def kkt_residual(X: np.ndarray, V: np.ndarray, U: np.ndarray, norm_bound: float) -> float:
    """
    First-order optimality certificate of a codebook

    For column k with gradient column grad_k of 2(U V V' - X V'): interior
    columns contribute ||grad_k||; boundary columns contribute the part of
    grad_k orthogonal to u_k plus any outward radial component.

    Returns:
        Maximum over columns (0 for an empty codebook)
    """
    X = np.asarray(X, dtype=float)
    V = np.asarray(V, dtype=float)
    U = np.asarray(U, dtype=float)
    if U.shape != (X.shape[0], V.shape[0]) or X.shape[1] != V.shape[1]:
        raise DimensionMismatchError(
            f"inconsistent shapes X {X.shape}, V {V.shape}, U {U.shape}")

    gradient = 2.0 * (U @ (V @ V.T) - X @ V.T)
    worst = 0.0
    for k in range(U.shape[1]):
        u = U[:, k]
        grad = gradient[:, k]
        squared = float(u @ u)
        if squared < norm_bound - BOUNDARY_SLACK:
            residual = float(np.linalg.norm(grad))
        else:
            direction = u / np.sqrt(squared)
            radial = float(grad @ direction)
            residual = float(np.linalg.norm(grad - radial * direction)) + max(0.0, radial)
        worst = max(worst, residual)
    return worst
