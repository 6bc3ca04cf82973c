"""
Configuration Loading
Reads config/crodomsc.yaml (or the file named by CRODOMSC_CONFIG) over built-in defaults
"""

import copy
import logging
import os
from pathlib import Path
from typing import Dict, Optional, Union

import yaml
from dotenv import load_dotenv

from .exceptions import InvalidConfigError
from .models import LaplacianKind

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = 'CRODOMSC_CONFIG'
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / 'config' / 'crodomsc.yaml'

DEFAULTS: Dict[str, dict] = {
    'trainer': {
        'n_codewords': 128,
        'alpha': 0.15,
        'beta': 1.0,
        'gamma': 1.0,
        'norm_bound': 1.0,
        'max_iter': 50,
        'tol': 1e-6,
        'seed': 0,
        'laplacian': 'absolute',
    },
    'solver': {
        'max_steps': 1000,
        'tolerance': 1e-8,
        'ridge_start': 1e-10,
        'ridge_factor': 10.0,
        'ridge_max': 1e-2,
    },
    'codebook': {
        'max_sweeps': 200,
        'tolerance': 1e-8,
    },
    'initialization': {
        'warmup_sweeps': 5,
    },
    'synthetic': {
        'n_features': 20,
        'n_atoms': 15,
        'n_source': 30,
        'n_target': 30,
        'n_test': 40,
        'n_classes': 4,
        'sparsity': 3,
        'shift': 2.0,
        'noise': 0.1,
        'target_label_fraction': 0.25,
        'seed': 0,
    },
}


def default_config() -> Dict[str, dict]:
    """Fresh copy of the built-in defaults"""
    return copy.deepcopy(DEFAULTS)


def resolve_config_path(path: Optional[Union[str, Path]] = None) -> Path:
    """Explicit path, then CRODOMSC_CONFIG (a .env file may set it), then the bundled file"""
    if path is not None:
        return Path(path)
    load_dotenv()
    from_env = os.getenv(CONFIG_ENV_VAR)
    if from_env:
        return Path(from_env)
    return DEFAULT_CONFIG_PATH


def load_config(path: Optional[Union[str, Path]] = None) -> Dict[str, dict]:
    """
    Load configuration merged over the defaults

    Args:
        path: YAML file to read; see resolve_config_path for the fallbacks

    Returns:
        Mapping of section name to settings

    Raises:
        InvalidConfigError: unreadable YAML, a section that is not a mapping,
            or an unknown laplacian kind
    """
    config = default_config()
    config_path = resolve_config_path(path)
    explicit = path is not None or bool(os.getenv(CONFIG_ENV_VAR))

    if not config_path.exists():
        if explicit:
            raise InvalidConfigError(f"config file not found: {config_path}")
        logger.debug("No config file at %s, using built-in defaults", config_path)
        return config

    try:
        with open(config_path, 'r', encoding='utf-8') as handle:
            loaded = yaml.safe_load(handle) or {}
    except yaml.YAMLError as exc:
        raise InvalidConfigError(f"{config_path}: malformed YAML: {exc}") from exc

    if not isinstance(loaded, dict):
        raise InvalidConfigError(f"{config_path}: top level must be a mapping")

    for section, values in loaded.items():
        if values is None:
            continue
        if not isinstance(values, dict):
            raise InvalidConfigError(f"{config_path}: section '{section}' must be a mapping")
        config.setdefault(section, {}).update(values)

    kind = config['trainer'].get('laplacian')
    try:
        LaplacianKind(str(kind).lower())
    except ValueError:
        raise InvalidConfigError(
            f"{config_path}: unknown laplacian kind {kind!r}") from None

    logger.debug("Loaded configuration from %s", config_path)
    return config
