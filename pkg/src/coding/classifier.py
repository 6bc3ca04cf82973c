"""
Nearest-Centroid Classifier
Downstream classifier over sparse codes used to score representations
"""

from typing import List, Optional, Sequence

import numpy as np
from sklearn.metrics import accuracy_score

from .exceptions import DimensionMismatchError, EmptyInputError, NoLabeledSamplesError
from .models import CentroidModel

# Distances this close count as a tie
TIE_RTOL = 1e-12
TIE_ATOL = 1e-12


def fit_centroids(codes: np.ndarray, labels: Sequence[Optional[str]]) -> CentroidModel:
    """
    Mean code per class

    Args:
        codes: K x N code matrix
        labels: N optional labels; unlabeled columns are ignored

    Returns:
        CentroidModel with classes in sorted order
    """
    codes = np.asarray(codes, dtype=float)
    if codes.ndim != 2 or codes.shape[1] != len(labels):
        raise DimensionMismatchError(
            f"{len(labels)} labels for a code matrix of shape {codes.shape}")

    classes = sorted({str(label) for label in labels if label is not None})
    if not classes:
        raise NoLabeledSamplesError("no labeled samples to fit centroids on")

    keys = np.array(['' if label is None else str(label) for label in labels], dtype=object)
    labeled = np.array([label is not None for label in labels], dtype=bool)
    centroids = np.column_stack([
        codes[:, labeled & (keys == cls)].mean(axis=1) for cls in classes
    ])
    return CentroidModel(classes=tuple(classes), centroids=centroids)


def predict(model: CentroidModel, code: np.ndarray) -> str:
    """Class of the nearest centroid; ties go to the lexicographically first class"""
    code = np.asarray(code, dtype=float)
    if code.shape != (model.n_codewords,):
        raise DimensionMismatchError(
            f"code has shape {code.shape}, centroids are {model.n_codewords}-dimensional")
    distances = np.linalg.norm(model.centroids - code[:, None], axis=0)
    nearest = np.isclose(distances, distances.min(), rtol=TIE_RTOL, atol=TIE_ATOL)
    return model.classes[int(np.flatnonzero(nearest)[0])]


def predict_batch(model: CentroidModel, codes: np.ndarray) -> List[str]:
    codes = np.asarray(codes, dtype=float)
    if codes.ndim != 2:
        raise DimensionMismatchError(f"codes must be a K x M matrix, got shape {codes.shape}")
    return [predict(model, codes[:, j]) for j in range(codes.shape[1])]


def accuracy(predictions: Sequence[str], truths: Sequence[str]) -> float:
    """Fraction of exact matches"""
    if len(predictions) != len(truths):
        raise DimensionMismatchError(
            f"{len(predictions)} predictions for {len(truths)} truths")
    if len(predictions) == 0:
        raise EmptyInputError("accuracy of an empty prediction list")
    return float(accuracy_score(list(truths), list(predictions)))
