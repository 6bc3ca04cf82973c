"""
Storage module
Dataset, code, history and model files
"""

from .formats import (
    load_dataset, save_dataset, read_matrix, write_matrix, read_meta,
    read_codes, write_codes, write_history, write_metrics, save_model, load_model,
    MODEL_VERSION
)

__all__ = [
    'load_dataset',
    'save_dataset',
    'read_matrix',
    'write_matrix',
    'read_meta',
    'read_codes',
    'write_codes',
    'write_history',
    'write_metrics',
    'save_model',
    'load_model',
    'MODEL_VERSION',
]
