"""
Regularizers
Label graph W, its Laplacian, the domain indicator pi and E = beta L + gamma pi pi'
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import DimensionMismatchError, EmptyInputError, MissingDomainError
from .models import Dataset, Domain, Hyperparams, LaplacianKind, RegularizerBundle


def build_label_matrix(labels: Sequence[Optional[str]]) -> np.ndarray:
    """
    Semi-supervised label matrix

    W_ij = +1 when samples i and j carry the same label, -1 when both are
    labeled differently, 0 when either is unlabeled. Labeled samples get
    W_ii = +1.
    """
    if len(labels) == 0:
        raise EmptyInputError("label list is empty")

    labeled = np.array([label is not None for label in labels], dtype=bool)
    # Unlabeled entries get a placeholder; they are masked out below
    keys = np.array(['' if label is None else str(label) for label in labels], dtype=object)

    same = keys[:, None] == keys[None, :]
    both = labeled[:, None] & labeled[None, :]
    W = np.where(same, 1.0, -1.0)
    W[~both] = 0.0
    return W


def build_laplacian(W: np.ndarray, absolute_degree: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Degree vector and Laplacian L = diag(d) - W

    Args:
        W: Square symmetric label matrix
        absolute_degree: Use d_i = sum_j |W_ij| instead of sum_j W_ij. The
            signed degree can be negative and leaves L indefinite; the
            absolute degree gives the positive semidefinite signed-graph
            Laplacian.

    Returns:
        Tuple of (degree, L)
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionMismatchError(f"W must be square, got shape {W.shape}")

    degree = np.abs(W).sum(axis=1) if absolute_degree else W.sum(axis=1)
    L = np.diag(degree) - W
    return degree, L


def build_domain_indicator(domains: Sequence[Union[Domain, str]]) -> np.ndarray:
    """pi_i = 1/N_S for source samples and -1/N_T for target samples"""
    tags = [Domain.parse(d) for d in domains]
    source = np.array([d is Domain.SOURCE for d in tags], dtype=bool)
    n_source = int(source.sum())
    n_target = len(tags) - n_source

    if n_source == 0:
        raise MissingDomainError("no source samples")
    if n_target == 0:
        raise MissingDomainError("no target samples")

    return np.where(source, 1.0 / n_source, -1.0 / n_target)


def build_E(L: np.ndarray, pi: np.ndarray, beta: float, gamma: float) -> np.ndarray:
    """Dense E = beta L + gamma pi pi'"""
    L = np.asarray(L, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or pi.shape != (L.shape[0],):
        raise DimensionMismatchError(
            f"L has shape {L.shape} but pi has shape {pi.shape}")
    return beta * L + gamma * np.outer(pi, pi)


def mmd_term(V: np.ndarray, pi: np.ndarray) -> float:
    """||V pi||^2, the squared distance between source and target mean codes"""
    V = np.asarray(V, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if V.ndim != 2 or V.shape[1] != pi.shape[0]:
        raise DimensionMismatchError(
            f"V has {V.shape[1] if V.ndim == 2 else '?'} columns but pi has {pi.shape[0]} entries")
    mean_gap = V @ pi
    return float(mean_gap @ mean_gap)


def laplacian_term(V: np.ndarray, L: np.ndarray) -> float:
    """Tr(V L V')"""
    V = np.asarray(V, dtype=float)
    L = np.asarray(L, dtype=float)
    if V.ndim != 2 or L.shape != (V.shape[1], V.shape[1]):
        raise DimensionMismatchError(f"V has shape {V.shape} but L has shape {L.shape}")
    return float(np.sum((V @ L) * V))


def build_regularizers(dataset: Dataset, hyper: Hyperparams) -> RegularizerBundle:
    """All training regularizers of a dataset under the given weights"""
    W = build_label_matrix(dataset.labels)
    degree, L = build_laplacian(W, absolute_degree=hyper.laplacian is LaplacianKind.ABSOLUTE)
    pi = build_domain_indicator(dataset.domains)
    E = build_E(L, pi, hyper.beta, hyper.gamma)
    return RegularizerBundle(
        label_matrix=W,
        degree=degree,
        laplacian=L,
        pi=pi,
        E=E,
        kind=hyper.laplacian,
        beta=hyper.beta,
        gamma=hyper.gamma
    )
