"""
Data Models for Cross-Domain Sparse Coding
Core data structures used throughout the system

Samples are columns: a feature matrix is D x N and a code matrix is K x N.
"""

import math
from dataclasses import dataclass, field, asdict, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import (
    DimensionMismatchError, InfeasibleCodebookError, InvalidConfigError,
    InvalidHyperparamsError, NonFiniteError
)

# Slack allowed on the codeword norm bound ||u_k||^2 <= c
NORM_BOUND_SLACK = 1e-8


class Domain(Enum):
    """Domain tag of a sample"""
    SOURCE = "S"
    TARGET = "T"

    @classmethod
    def parse(cls, value: Union["Domain", str]) -> "Domain":
        """Accept a Domain or its one-letter tag"""
        if isinstance(value, Domain):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValueError(f"unknown domain tag {value!r} (expected 'S' or 'T')") from None


class LaplacianKind(Enum):
    """How node degrees of the signed label graph are computed"""
    SIGNED = "signed"        # d_i = sum_j W_ij, may be negative
    ABSOLUTE = "absolute"    # d_i = sum_j |W_ij|, positive semidefinite Laplacian


class StopReason(Enum):
    """Why training stopped"""
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"


def _frozen_matrix(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    if array.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a 2-D matrix, got shape {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix X (D x N) with one domain tag and optional label per column"""
    features: np.ndarray
    domains: Tuple[Domain, ...]
    labels: Tuple[Optional[str], ...]

    def __post_init__(self):
        features = _frozen_matrix(self.features, "features")
        domains = tuple(Domain.parse(d) for d in self.domains)
        labels = tuple(None if label is None else str(label) for label in self.labels)

        n_samples = features.shape[1]
        if len(domains) != n_samples:
            raise DimensionMismatchError(
                f"{len(domains)} domain tags for {n_samples} samples")
        if len(labels) != n_samples:
            raise DimensionMismatchError(
                f"{len(labels)} labels for {n_samples} samples")

        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'domains', domains)
        object.__setattr__(self, 'labels', labels)

    @property
    def n_features(self) -> int:
        return self.features.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]

    @property
    def source_mask(self) -> np.ndarray:
        return np.array([d is Domain.SOURCE for d in self.domains], dtype=bool)

    @property
    def target_mask(self) -> np.ndarray:
        return np.array([d is Domain.TARGET for d in self.domains], dtype=bool)

    @property
    def labeled_mask(self) -> np.ndarray:
        return np.array([label is not None for label in self.labels], dtype=bool)

    @property
    def n_source(self) -> int:
        return int(self.source_mask.sum())

    @property
    def n_target(self) -> int:
        return int(self.target_mask.sum())

    @property
    def classes(self) -> List[str]:
        """Sorted distinct labels"""
        return sorted({label for label in self.labels if label is not None})

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """Dataset restricted to the given sample indices (in that order)"""
        indices = list(indices)
        return Dataset(
            features=self.features[:, indices],
            domains=tuple(self.domains[i] for i in indices),
            labels=tuple(self.labels[i] for i in indices)
        )

    def to_dataframe(self) -> pd.DataFrame:
        """Per-sample metadata (domain tag and label) as a DataFrame"""
        return pd.DataFrame({
            'domain': [d.value for d in self.domains],
            'label': list(self.labels)
        })


@dataclass(frozen=True)
class Violation:
    """One broken dataset rule"""
    rule: str
    message: str
    index: Optional[int] = None


@dataclass(frozen=True)
class ValidationReport:
    """Result of dataset validation; ok iff there are no violations"""
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def messages(self) -> List[str]:
        return [v.message for v in self.violations]


@dataclass(frozen=True)
class Hyperparams:
    """Training hyperparameters of the cross-domain objective"""
    n_codewords: int = 128
    alpha: float = 0.15
    beta: float = 1.0
    gamma: float = 1.0
    norm_bound: float = 1.0
    max_iter: int = 50
    tol: float = 1e-6
    seed: int = 0
    laplacian: LaplacianKind = LaplacianKind.ABSOLUTE

    def __post_init__(self):
        if not isinstance(self.laplacian, LaplacianKind):
            try:
                object.__setattr__(self, 'laplacian', LaplacianKind(str(self.laplacian).lower()))
            except ValueError:
                raise InvalidHyperparamsError(
                    f"laplacian must be one of {[k.value for k in LaplacianKind]}, "
                    f"got {self.laplacian!r}") from None

        issues = []
        if int(self.n_codewords) != self.n_codewords or self.n_codewords < 1:
            issues.append(f"K (n_codewords) must be an integer >= 1, got {self.n_codewords}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            issues.append(f"alpha must be > 0, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            issues.append(f"beta must be >= 0, got {self.beta}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            issues.append(f"gamma must be >= 0, got {self.gamma}")
        if not (math.isfinite(self.norm_bound) and self.norm_bound > 0):
            issues.append(f"c (norm_bound) must be > 0, got {self.norm_bound}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            issues.append(f"T (max_iter) must be an integer >= 1, got {self.max_iter}")
        if math.isnan(self.tol) or self.tol < 0:
            issues.append(f"tol must be >= 0, got {self.tol}")
        if int(self.seed) != self.seed:
            issues.append(f"seed must be an integer, got {self.seed}")
        if issues:
            raise InvalidHyperparamsError("; ".join(issues))

        object.__setattr__(self, 'n_codewords', int(self.n_codewords))
        object.__setattr__(self, 'max_iter', int(self.max_iter))
        object.__setattr__(self, 'seed', int(self.seed))

    def with_updates(self, **changes) -> "Hyperparams":
        """Copy with some fields replaced (validated again)"""
        return replace(self, **changes)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['laplacian'] = self.laplacian.value
        return data

    @classmethod
    def from_config(cls, config: Dict) -> "Hyperparams":
        """Build from the 'trainer' section of a loaded configuration"""
        section = dict(config.get('trainer') or {})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(section) - known
        if unknown:
            raise InvalidConfigError(f"unknown trainer settings: {sorted(unknown)}")
        return cls(**section)


@dataclass(frozen=True)
class SolverSettings:
    """Numerical settings of the per-sample and codebook solvers"""
    max_steps: int = 1000
    tolerance: float = 1e-8
    ridge_start: float = 1e-10
    ridge_factor: float = 10.0
    ridge_max: float = 1e-2
    codebook_max_sweeps: int = 200
    codebook_tolerance: float = 1e-8
    warmup_sweeps: int = 5

    def ridge_ladder(self) -> List[float]:
        """Ridges tried in order; 0 first (no safeguard)"""
        ladder = [0.0]
        ridge = self.ridge_start
        while ridge <= self.ridge_max * (1 + 1e-9):
            ladder.append(ridge)
            ridge *= self.ridge_factor
        return ladder

    @classmethod
    def from_config(cls, config: Dict) -> "SolverSettings":
        """Build from the 'solver', 'codebook' and 'initialization' sections"""
        solver = dict(config.get('solver') or {})
        codebook = dict(config.get('codebook') or {})
        init = dict(config.get('initialization') or {})
        try:
            return cls(
                max_steps=int(solver.get('max_steps', cls.max_steps)),
                tolerance=float(solver.get('tolerance', cls.tolerance)),
                ridge_start=float(solver.get('ridge_start', cls.ridge_start)),
                ridge_factor=float(solver.get('ridge_factor', cls.ridge_factor)),
                ridge_max=float(solver.get('ridge_max', cls.ridge_max)),
                codebook_max_sweeps=int(codebook.get('max_sweeps', cls.codebook_max_sweeps)),
                codebook_tolerance=float(codebook.get('tolerance', cls.codebook_tolerance)),
                warmup_sweeps=int(init.get('warmup_sweeps', cls.warmup_sweeps))
            )
        except (TypeError, ValueError) as exc:
            raise InvalidConfigError(f"malformed solver settings: {exc}") from exc


@dataclass(frozen=True, eq=False)
class Model:
    """Trained codebook U (D x K) and the hyperparameters it was trained with"""
    codebook: np.ndarray
    hyperparams: Hyperparams

    def __post_init__(self):
        codebook = _frozen_matrix(self.codebook, "codebook")
        if codebook.shape[1] != self.hyperparams.n_codewords:
            raise DimensionMismatchError(
                f"codebook has {codebook.shape[1]} columns, hyperparams say K="
                f"{self.hyperparams.n_codewords}")
        if not np.all(np.isfinite(codebook)):
            raise NonFiniteError("codebook contains non-finite entries")
        norms = np.sum(codebook ** 2, axis=0)
        bound = self.hyperparams.norm_bound + NORM_BOUND_SLACK
        if np.any(norms > bound):
            worst = int(np.argmax(norms))
            raise InfeasibleCodebookError(
                f"codeword {worst} has squared norm {norms[worst]:.6g} > c={self.hyperparams.norm_bound}")
        object.__setattr__(self, 'codebook', codebook)

    @property
    def n_features(self) -> int:
        return self.codebook.shape[0]

    @property
    def n_codewords(self) -> int:
        return self.codebook.shape[1]


@dataclass(eq=False)
class CodeProblem:
    """
    Per-sample subproblem

        min_v ||x - U v||^2 + e v'v + v'f + alpha ||v||_1
    """
    x: np.ndarray
    dictionary: np.ndarray
    e: float
    f: np.ndarray
    alpha: float

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=float)
        self.dictionary = np.ascontiguousarray(self.dictionary, dtype=float)
        self.f = np.ascontiguousarray(self.f, dtype=float)
        self.e = float(self.e)
        self.alpha = float(self.alpha)

        if self.dictionary.ndim != 2:
            raise DimensionMismatchError(f"dictionary must be 2-D, got shape {self.dictionary.shape}")
        n_features, n_codewords = self.dictionary.shape
        if self.x.shape != (n_features,):
            raise DimensionMismatchError(
                f"sample has shape {self.x.shape}, dictionary expects ({n_features},)")
        if self.f.shape != (n_codewords,):
            raise DimensionMismatchError(
                f"coupling vector has shape {self.f.shape}, expected ({n_codewords},)")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.dictionary))
                and np.all(np.isfinite(self.f)) and math.isfinite(self.e)):
            raise NonFiniteError("code problem contains non-finite entries")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidHyperparamsError(f"alpha must be > 0, got {self.alpha}")

    @property
    def n_codewords(self) -> int:
        return self.dictionary.shape[1]


@dataclass(eq=False)
class CodeSolution:
    """Solution of a per-sample subproblem"""
    v: np.ndarray
    objective: float
    iterations: int
    converged: bool = True
    ridge: float = 0.0
    trace: Tuple[float, ...] = ()

    @property
    def ridge_triggered(self) -> bool:
        return self.ridge > 0


@dataclass(eq=False)
class CodebookProblem:
    """min_U ||X - U V||^2  s.t.  ||u_k||^2 <= c for every column"""
    X: np.ndarray
    V: np.ndarray
    norm_bound: float
    initial: Optional[np.ndarray] = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.V = np.asarray(self.V, dtype=float)
        if self.X.ndim != 2 or self.V.ndim != 2:
            raise DimensionMismatchError("X and V must be 2-D matrices")
        if self.X.shape[1] != self.V.shape[1]:
            raise DimensionMismatchError(
                f"X has {self.X.shape[1]} samples but V has {self.V.shape[1]}")
        if self.initial is not None:
            self.initial = np.asarray(self.initial, dtype=float)
            expected = (self.X.shape[0], self.V.shape[0])
            if self.initial.shape != expected:
                raise DimensionMismatchError(
                    f"warm start has shape {self.initial.shape}, expected {expected}")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.V))):
            raise NonFiniteError("codebook problem contains non-finite entries")
        if not (math.isfinite(self.norm_bound) and self.norm_bound > 0):
            raise InvalidHyperparamsError(f"c must be > 0, got {self.norm_bound}")

    @property
    def n_codewords(self) -> int:
        return self.V.shape[0]


@dataclass(eq=False)
class RegularizerBundle:
    """Label graph, Laplacian, domain indicator and the combined E = beta L + gamma pi pi'"""
    label_matrix: np.ndarray
    degree: np.ndarray
    laplacian: np.ndarray
    pi: np.ndarray
    E: np.ndarray
    kind: LaplacianKind
    beta: float
    gamma: float


@dataclass(eq=False)
class CentroidModel:
    """Class centroids in code space; column j belongs to classes[j]"""
    classes: Tuple[str, ...]
    centroids: np.ndarray

    @property
    def n_codewords(self) -> int:
        return self.centroids.shape[0]


@dataclass
class HistoryRecord:
    """Objective breakdown at one point of training"""
    iteration: int
    reconstruction: float
    laplacian: float
    mmd: float
    sparsity: float
    ridge_triggered: bool = False
    kkt_residual: Optional[float] = None
    relative_change: Optional[float] = None

    @property
    def total(self) -> float:
        return self.reconstruction + self.laplacian + self.mmd + self.sparsity

    def to_dict(self) -> dict:
        return {
            'iteration': self.iteration,
            'reconstruction': self.reconstruction,
            'laplacian': self.laplacian,
            'mmd': self.mmd,
            'sparsity': self.sparsity,
            'total': self.total,
            'ridge_triggered': self.ridge_triggered,
            'kkt_residual': self.kkt_residual,
            'relative_change': self.relative_change
        }


@dataclass
class TrainHistory:
    """Objective records; the first one is the initial point"""
    records: List[HistoryRecord] = field(default_factory=list)

    def append(self, record: HistoryRecord):
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[HistoryRecord]:
        return iter(self.records)

    def __getitem__(self, index: int) -> HistoryRecord:
        return self.records[index]

    @property
    def totals(self) -> List[float]:
        return [record.total for record in self.records]

    def is_monotone(self, slack: float = 1e-6) -> bool:
        """True if totals never increase by more than slack (flagged sweeps excepted)"""
        for previous, current in zip(self.records, self.records[1:]):
            if current.total > previous.total + slack and not current.ridge_triggered:
                return False
        return True

    def to_dataframe(self) -> pd.DataFrame:
        columns = ['iteration', 'reconstruction', 'laplacian', 'mmd', 'sparsity', 'total',
                   'ridge_triggered', 'kkt_residual', 'relative_change']
        return pd.DataFrame([record.to_dict() for record in self.records], columns=columns)


@dataclass(eq=False)
class FitResult:
    """Output of training"""
    model: Model
    codes: np.ndarray
    history: TrainHistory
    stop_reason: StopReason
    regularizers: Optional[RegularizerBundle] = None
