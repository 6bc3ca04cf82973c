"""
Tests for configuration loading
"""

import pytest

from src.coding.config import CONFIG_ENV_VAR, DEFAULT_CONFIG_PATH, load_config
from src.coding.exceptions import InvalidConfigError
from src.coding.models import Hyperparams, LaplacianKind, SolverSettings
from utils.sample_data import SynthConfig


@pytest.fixture(autouse=True)
def no_env_config(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


def test_bundled_config_matches_defaults():
    assert DEFAULT_CONFIG_PATH.exists()
    config = load_config()
    assert Hyperparams.from_config(config) == Hyperparams()
    assert SolverSettings.from_config(config) == SolverSettings()
    assert SynthConfig.from_config(config) == SynthConfig()


def test_partial_file_falls_back_to_defaults(tmp_path):
    path = tmp_path / 'partial.yaml'
    path.write_text("trainer:\n  alpha: 0.3\n  laplacian: signed\nsolver:\n  max_steps: 50\n")
    config = load_config(path)
    hyper = Hyperparams.from_config(config)
    assert hyper.alpha == 0.3
    assert hyper.beta == 1.0
    assert hyper.laplacian is LaplacianKind.SIGNED
    assert SolverSettings.from_config(config).max_steps == 50


def test_environment_variable(tmp_path, monkeypatch):
    path = tmp_path / 'env.yaml'
    path.write_text("trainer:\n  n_codewords: 9\n")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    assert Hyperparams.from_config(load_config()).n_codewords == 9


def test_missing_explicit_file(tmp_path):
    with pytest.raises(InvalidConfigError):
        load_config(tmp_path / 'absent.yaml')


def test_malformed_yaml(tmp_path):
    path = tmp_path / 'bad.yaml'
    path.write_text("trainer: [unclosed\n")
    with pytest.raises(InvalidConfigError):
        load_config(path)


def test_section_must_be_mapping(tmp_path):
    path = tmp_path / 'list.yaml'
    path.write_text("trainer:\n  - 1\n  - 2\n")
    with pytest.raises(InvalidConfigError):
        load_config(path)


def test_unknown_laplacian_kind(tmp_path):
    path = tmp_path / 'kind.yaml'
    path.write_text("trainer:\n  laplacian: normalized\n")
    with pytest.raises(InvalidConfigError):
        load_config(path)
