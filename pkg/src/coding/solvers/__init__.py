"""
Solvers for the two alternating subproblems
"""

from .feature_sign import (
    FeatureSignSolver, solve_code, solve_code_bruteforce, code_objective, optimality_violation,
    is_unbounded_below
)
from .codebook import CodebookSolver, update_codebook, kkt_residual, reconstruction_error

__all__ = [
    'FeatureSignSolver',
    'solve_code',
    'solve_code_bruteforce',
    'code_objective',
    'optimality_violation',
    'is_unbounded_below',
    'CodebookSolver',
    'update_codebook',
    'kkt_residual',
    'reconstruction_error',
]
