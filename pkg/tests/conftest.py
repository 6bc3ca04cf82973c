"""
Shared fixtures for the test suite
"""

import numpy as np
import pytest

from src.coding.models import Dataset, Domain, Hyperparams
from utils.sample_data import SynthConfig, generate


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_dataset():
    """Two labeled source samples and two target samples (one labeled)"""
    features = np.array([
        [1.0, 0.9, 0.1, 0.0],
        [0.0, 0.1, 1.0, 0.8],
        [0.5, 0.4, 0.3, 0.6],
    ])
    return Dataset(
        features=features,
        domains=(Domain.SOURCE, Domain.SOURCE, Domain.TARGET, Domain.TARGET),
        labels=('A', 'B', 'A', None)
    )


@pytest.fixture(scope='session')
def synth_default():
    """Default synthetic problem (D=20, K_true=15, 30 source, 30 target)"""
    return generate(SynthConfig())


@pytest.fixture
def synth_hyper():
    """Hyperparameters sized for the default synthetic problem"""
    return Hyperparams(n_codewords=15, max_iter=30, tol=0.0)
