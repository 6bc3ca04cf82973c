"""
Coding Module
Cross-domain sparse coding: shared codebook learning over source and target
domains with label-graph and mean-discrepancy regularizers
"""

from .models import (
    Domain, LaplacianKind, StopReason, Dataset, Violation, ValidationReport,
    Hyperparams, SolverSettings, Model, CodeProblem, CodeSolution, CodebookProblem,
    RegularizerBundle, CentroidModel, HistoryRecord, TrainHistory, FitResult
)
from .processor import DatasetProcessor, validate_dataset
from .regularizer import (
    build_label_matrix, build_laplacian, build_domain_indicator, build_E, mmd_term,
    build_regularizers
)
from .solvers import solve_code, solve_code_bruteforce, update_codebook, kkt_residual
from .engine import CroDomScTrainer, objective, compute_f, init_model, fit
from .encoder import Encoder, encode, encode_batch
from .classifier import fit_centroids, predict, predict_batch, accuracy
from .config import load_config

__all__ = [
    'Domain',
    'LaplacianKind',
    'StopReason',
    'Dataset',
    'Violation',
    'ValidationReport',
    'Hyperparams',
    'SolverSettings',
    'Model',
    'CodeProblem',
    'CodeSolution',
    'CodebookProblem',
    'RegularizerBundle',
    'CentroidModel',
    'HistoryRecord',
    'TrainHistory',
    'FitResult',
    'DatasetProcessor',
    'validate_dataset',
    'build_label_matrix',
    'build_laplacian',
    'build_domain_indicator',
    'build_E',
    'mmd_term',
    'build_regularizers',
    'solve_code',
    'solve_code_bruteforce',
    'update_codebook',
    'kkt_residual',
    'CroDomScTrainer',
    'objective',
    'compute_f',
    'init_model',
    'fit',
    'Encoder',
    'encode',
    'encode_batch',
    'fit_centroids',
    'predict',
    'predict_batch',
    'accuracy',
    'load_config',
]
