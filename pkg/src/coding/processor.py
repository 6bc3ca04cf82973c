"""
Data Processing Utilities
Handles dataset validation ahead of training and evaluation
"""

from typing import List

import numpy as np

from .exceptions import DatasetValidationError
from .models import Dataset, Domain, ValidationReport, Violation


class DatasetProcessor:
    """Validates the mutual consistency of features, domains and labels"""

    def validate_data(self, dataset: Dataset, for_training: bool = True) -> ValidationReport:
        """
        Check a dataset against the training rules

        Args:
            dataset: Dataset to validate
            for_training: When False (held-out target sets) only the shape and
                finiteness rules apply

        Returns:
            ValidationReport listing every violation, empty when the data is usable
        """
        violations: List[Violation] = []

        if dataset.n_features < 1:
            violations.append(Violation('feature_dim', "feature dimension must be >= 1"))

        finite_columns = np.all(np.isfinite(dataset.features), axis=0)
        for index in np.flatnonzero(~finite_columns):
            violations.append(Violation(
                'finite', f"non-finite feature in sample at index {int(index)}", int(index)))

        if for_training:
            if dataset.n_samples < 2:
                violations.append(Violation(
                    'min_samples', f"need at least 2 samples, got {dataset.n_samples}"))
            if dataset.n_source == 0:
                violations.append(Violation('source_present', "no source samples"))
            if dataset.n_target == 0:
                violations.append(Violation('target_present', "no target samples"))

            for index, (domain, label) in enumerate(zip(dataset.domains, dataset.labels)):
                if domain is Domain.SOURCE and label is None:
                    violations.append(Violation(
                        'source_labeled', f"unlabeled source sample at index {index}", index))

        return ValidationReport(tuple(violations))

    def require_valid(self, dataset: Dataset, for_training: bool = True) -> Dataset:
        """Return the dataset unchanged or raise DatasetValidationError"""
        report = self.validate_data(dataset, for_training=for_training)
        if not report.ok:
            raise DatasetValidationError(
                "invalid dataset: " + "; ".join(report.messages()),
                list(report.violations))
        return dataset


def validate_dataset(dataset: Dataset, for_training: bool = True) -> ValidationReport:
    """Validate a dataset; violations are returned, never raised"""
    return DatasetProcessor().validate_data(dataset, for_training=for_training)


def require_valid(dataset: Dataset, for_training: bool = True) -> Dataset:
    return DatasetProcessor().require_valid(dataset, for_training=for_training)
