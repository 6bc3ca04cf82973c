"""
Evaluation
Repeated-split comparison of cross-domain sparse coding against variants that
drop one or both regularizers
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
import plotly.graph_objects as go

from .classifier import accuracy, fit_centroids, predict_batch
from .encoder import Encoder
from .engine import CroDomScTrainer
from .exceptions import NoLabeledSamplesError
from .models import Dataset, FitResult, Hyperparams, SolverSettings
from .processor import require_valid
from .regularizer import mmd_term

logger = logging.getLogger(__name__)

# Weight overrides per method; an empty mapping keeps the given beta and gamma
METHODS: Dict[str, Dict[str, float]] = {
    'crodomsc': {},
    'label_only': {'gamma': 0.0},
    'mmd_only': {'beta': 0.0},
    'sparse_coding': {'beta': 0.0, 'gamma': 0.0},
}


@dataclass
class SplitReport:
    """Scores of one trained model on one train/test split"""
    accuracy: float
    mmd: float
    objective: float
    iterations: int
    stop_reason: str
    fit: Optional[FitResult] = None
    test_codes: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {
            'accuracy': self.accuracy,
            'mmd': self.mmd,
            'objective': self.objective,
            'iterations': self.iterations,
            'stop_reason': self.stop_reason,
        }


def evaluate_split(train: Dataset, test: Dataset, hyper: Hyperparams,
                   settings: Optional[SolverSettings] = None) -> SplitReport:
    """
    Fit on train, encode test, classify by nearest labeled centroid

    Args:
        train: Training set (source plus target samples)
        test: Held-out target samples; only labeled ones are scored
        hyper: Training hyperparameters

    Returns:
        SplitReport with test accuracy and the unweighted MMD ||V pi||^2 of
        the final training codes
    """
    require_valid(test, for_training=False)
    scored = [j for j, label in enumerate(test.labels) if label is not None]
    if not scored:
        raise NoLabeledSamplesError("test set has no labeled samples to score")
    result = CroDomScTrainer(hyper, settings).fit(train)

    centroids = fit_centroids(result.codes, train.labels)
    test_codes = Encoder(result.model, settings).encode_batch(test.features)
    predictions = predict_batch(centroids, test_codes[:, scored])
    truths = [test.labels[j] for j in scored]

    return SplitReport(
        accuracy=accuracy(predictions, truths),
        mmd=mmd_term(result.codes, result.regularizers.pi),
        objective=result.history[-1].total,
        iterations=len(result.history) - 1,
        stop_reason=result.stop_reason.value,
        fit=result,
        test_codes=test_codes
    )


def compare_methods(synth_config, hyper: Hyperparams, n_splits: int,
                    methods: Optional[Sequence[str]] = None,
                    settings: Optional[SolverSettings] = None) -> pd.DataFrame:
    """
    Evaluate every method on n_splits synthetic splits

    Split s is generated with seed synth_config.seed + s; all methods see the
    same data and the same initialization seed.

    Returns:
        DataFrame with one row per (split, method)
    """
    from utils.sample_data import generate

    methods = list(methods or METHODS)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")

    rows = []
    for split in range(n_splits):
        seed = synth_config.seed + split
        train, test, _ = generate(synth_config.with_updates(seed=seed))
        for method in methods:
            report = evaluate_split(train, test, hyper.with_updates(**METHODS[method]), settings)
            logger.info("Split %d %s: accuracy %.3f, mmd %.4g",
                        split, method, report.accuracy, report.mmd)
            rows.append({'split': split, 'seed': seed, 'method': method, **report.to_dict()})

    return pd.DataFrame(rows, columns=['split', 'seed', 'method', 'accuracy', 'mmd',
                                       'objective', 'iterations', 'stop_reason'])


def summarize(results: pd.DataFrame, metric: str = 'accuracy') -> pd.DataFrame:
    """Boxplot statistics (five-number summary) plus mean and std per method"""
    grouped = results.groupby('method', sort=False)[metric]
    summary = pd.DataFrame({
        'min': grouped.min(),
        'q1': grouped.quantile(0.25),
        'median': grouped.median(),
        'q3': grouped.quantile(0.75),
        'max': grouped.max(),
        'mean': grouped.mean(),
        'std': grouped.std(ddof=0),
    })
    summary.index.name = 'method'
    return summary


def boxplot_figure(results: pd.DataFrame, metric: str = 'accuracy') -> go.Figure:
    """One box per method over the splits"""
    fig = go.Figure()
    for method, group in results.groupby('method', sort=False):
        fig.add_trace(go.Box(y=group[metric], name=method, boxpoints='all'))
    fig.update_layout(
        title=f"{metric.capitalize()} over {results['split'].nunique()} splits",
        yaxis_title=metric,
        showlegend=False
    )
    return fig
