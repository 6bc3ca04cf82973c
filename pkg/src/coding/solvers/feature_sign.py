"""
Feature-Sign Search
Active-set solver for the per-sample L1-regularized quadratic

    min_v ||x - U v||^2 + e v'v + v'f + alpha ||v||_1

With A = U'U + e I and b = 2 U'x - f the smooth part is v'Av - b'v + x'x and
its gradient is g = 2 A v - b.
"""

import itertools
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import linprog

from ..exceptions import DimensionMismatchError, NonConvexSubproblemError, NonFiniteError, TooLargeError
from ..models import CodeProblem, CodeSolution, SolverSettings

logger = logging.getLogger(__name__)

# Enumeration bound of the brute-force oracle (3^K sign patterns)
BRUTEFORCE_MAX_CODEWORDS = 8

# Eigenvalues below this fraction of the largest count as zero curvature
NULL_CURVATURE = 1e-10


def code_objective(problem: CodeProblem, v: np.ndarray) -> float:
    """Value of the per-sample objective at v"""
    v = np.asarray(v, dtype=float)
    residual = problem.x - problem.dictionary @ v
    return float(residual @ residual + problem.e * (v @ v) + v @ problem.f
                 + problem.alpha * np.abs(v).sum())


def _quadratic_terms(problem: CodeProblem) -> Tuple[np.ndarray, np.ndarray]:
    U = problem.dictionary
    A = U.T @ U + problem.e * np.eye(problem.n_codewords)
    b = 2.0 * (U.T @ problem.x) - problem.f
    return A, b


def optimality_violation(problem: CodeProblem, v: np.ndarray) -> float:
    """
    Largest violation of the subgradient conditions at v

    Nonzero coordinates need |g_k + alpha sign(v_k)| = 0, zero coordinates
    need |g_k| <= alpha.
    """
    A, b = _quadratic_terms(problem)
    g = 2.0 * A @ v - b
    nonzero = v != 0
    worst = 0.0
    if nonzero.any():
        worst = float(np.max(np.abs(g[nonzero] + problem.alpha * np.sign(v[nonzero]))))
    if (~nonzero).any():
        worst = max(worst, float(np.max(np.abs(g[~nonzero]))) - problem.alpha)
    return max(worst, 0.0)


def is_unbounded_below(problem: CodeProblem) -> bool:
    """
    True when the objective decreases without bound along some direction

    Negative curvature is always unbounded. A step t d along the null space N
    of A changes the objective by t (alpha ||d||_1 - b'd), which never goes
    negative exactly when some s with |s_k| <= alpha satisfies N's = N'b.
    """
    A, b = _quadratic_terms(problem)
    eigenvalues, eigenvectors = np.linalg.eigh(A)
    threshold = NULL_CURVATURE * max(1.0, float(np.abs(eigenvalues).max()))
    if eigenvalues[0] < -threshold:
        return True
    null = eigenvectors[:, eigenvalues <= threshold]
    if null.shape[1] == 0:
        return False
    K = problem.n_codewords
    result = linprog(np.zeros(K), A_eq=null.T, b_eq=null.T @ b,
                     bounds=[(-problem.alpha, problem.alpha)] * K, method='highs')
    return result.status == 2


class FeatureSignSolver:
    """Feature-sign search with a ridge safeguard on indefinite active blocks"""

    def __init__(self, settings: Optional[SolverSettings] = None):
        self.settings = settings or SolverSettings()
        self._ladder = self.settings.ridge_ladder()

    def _solve_active(self, A_active: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, float]:
        """Solve A_active z = rhs, adding the smallest ridge that makes A_active factorizable"""
        identity = np.eye(A_active.shape[0])
        for ridge in self._ladder:
            try:
                factor = cho_factor(A_active + ridge * identity, lower=True, check_finite=False)
            except LinAlgError:
                continue
            solution = cho_solve(factor, rhs, check_finite=False)
            if not np.all(np.isfinite(solution)):
                continue
            if ridge > 0:
                logger.debug("Active block of size %d needed ridge %.1e", A_active.shape[0], ridge)
            return solution, ridge
        raise NonConvexSubproblemError(
            f"active quadratic of size {A_active.shape[0]} is not positive definite "
            f"even with ridge {self._ladder[-1]:.1e}")

    def _line_search(self, problem: CodeProblem, current: np.ndarray,
                     target: np.ndarray, active: np.ndarray) -> Tuple[np.ndarray, float]:
        """Best point among the target and every zero crossing on the segment"""
        best = target
        best_value = code_objective(problem, target)

        start = current[active]
        end = target[active]
        crossing = (start != 0) & (np.sign(start) != np.sign(end))
        for position in np.flatnonzero(crossing):
            t = start[position] / (start[position] - end[position])
            candidate = current + t * (target - current)
            candidate[active[position]] = 0.0
            value = code_objective(problem, candidate)
            if value < best_value:
                best, best_value = candidate, value
        return best, best_value

    def solve(self, problem: CodeProblem, warm_start: Optional[np.ndarray] = None) -> CodeSolution:
        """
        Run feature-sign search

        Args:
            problem: Per-sample subproblem
            warm_start: Optional starting code; its nonzero pattern seeds the
                active set and the returned objective never exceeds its value

        Returns:
            CodeSolution; converged is False when the step cap was hit or the
            line search could not improve

        Raises:
            NonConvexSubproblemError: no active block factorizes, or the search
                stalls on a problem that is unbounded below
        """
        K = problem.n_codewords
        A, b = _quadratic_terms(problem)
        half_b = 0.5 * b
        alpha = problem.alpha
        tolerance = self.settings.tolerance

        if warm_start is None:
            v = np.zeros(K)
        else:
            v = np.array(warm_start, dtype=float)
            if v.shape != (K,):
                raise DimensionMismatchError(f"warm start has shape {v.shape}, expected ({K},)")
            if not np.all(np.isfinite(v)):
                raise NonFiniteError("warm start contains non-finite entries")

        theta = np.sign(v)
        value = code_objective(problem, v)
        trace = [value]
        steps = 0
        ridge_used = 0.0
        converged = False

        while steps < self.settings.max_steps:
            g = 2.0 * A @ v - b
            nonzero = v != 0

            nonzero_ok = True
            if nonzero.any():
                nonzero_ok = np.max(np.abs(g[nonzero] + alpha * np.sign(v[nonzero]))) <= tolerance

            if nonzero_ok:
                zero_coords = np.flatnonzero(~nonzero)
                if zero_coords.size == 0:
                    converged = True
                    break
                # argmax returns the lowest index among ties
                k = int(zero_coords[np.argmax(np.abs(g[zero_coords]))])
                if abs(g[k]) <= alpha + tolerance:
                    converged = True
                    break
                theta[k] = -np.sign(g[k])

            steps += 1
            active = np.flatnonzero(theta != 0)
            rhs = half_b[active] - 0.5 * alpha * theta[active]
            solution, ridge = self._solve_active(A[np.ix_(active, active)], rhs)
            ridge_used = max(ridge_used, ridge)

            target = np.zeros(K)
            target[active] = solution
            candidate, candidate_value = self._line_search(problem, v, target, active)

            if not np.isfinite(candidate_value):
                raise NonFiniteError("objective overflowed during feature-sign search")
            if candidate_value >= value:
                # No strict progress: keep the current point
                trace.append(value)
                break

            v, value = candidate, candidate_value
            theta = np.sign(v)
            trace.append(value)
        else:
            logger.debug("Feature-sign search stopped at the step cap (%d)", self.settings.max_steps)

        if not converged and is_unbounded_below(problem):
            raise NonConvexSubproblemError(
                f"subproblem is unbounded below (objective reached {value:.6g} after {steps} steps)")

        return CodeSolution(
            v=v,
            objective=value,
            iterations=steps,
            converged=converged,
            ridge=ridge_used,
            trace=tuple(trace)
        )


def solve_code(problem: CodeProblem,
               warm_start: Optional[np.ndarray] = None,
               settings: Optional[SolverSettings] = None) -> CodeSolution:
    """Solve one per-sample subproblem with feature-sign search"""
    return FeatureSignSolver(settings).solve(problem, warm_start=warm_start)


def solve_code_bruteforce(problem: CodeProblem) -> CodeSolution:
    """
    Exact minimizer by enumerating every sign pattern

    For each pattern theta the quadratic restricted to its support is solved in
    closed form; the solution counts only if its signs match theta. The zero
    pattern is always feasible.
    """
    K = problem.n_codewords
    if K > BRUTEFORCE_MAX_CODEWORDS:
        raise TooLargeError(
            f"brute force enumerates 3^K patterns; K={K} exceeds {BRUTEFORCE_MAX_CODEWORDS}")

    A, b = _quadratic_terms(problem)
    half_b = 0.5 * b

    best = np.zeros(K)
    best_value = code_objective(problem, best)
    patterns = 0

    for pattern in itertools.product((-1.0, 0.0, 1.0), repeat=K):
        patterns += 1
        theta = np.array(pattern)
        support = np.flatnonzero(theta)
        if support.size == 0:
            continue
        try:
            solution = np.linalg.solve(A[np.ix_(support, support)],
                                       half_b[support] - 0.5 * problem.alpha * theta[support])
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.sign(solution) == theta[support]):
            continue
        v = np.zeros(K)
        v[support] = solution
        value = code_objective(problem, v)
        if value < best_value:
            best, best_value = v, value

    return CodeSolution(v=best, objective=best_value, iterations=patterns)
