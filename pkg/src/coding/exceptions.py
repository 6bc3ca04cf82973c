"""
Error Types
Every failure raised by the cross-domain sparse coding library
"""

from typing import Optional


class CroDomScError(Exception):
    """Base class for all library errors"""


class DimensionMismatchError(CroDomScError, ValueError):
    """Array shapes disagree (feature dimension, sample count, codeword count)"""


class NonFiniteError(CroDomScError, ArithmeticError):
    """NaN or Inf encountered in inputs or produced by a computation"""


class NonConvexSubproblemError(CroDomScError, ArithmeticError):
    """Per-sample quadratic stayed indefinite after the whole ridge ladder"""


class TooLargeError(CroDomScError, ValueError):
    """Problem exceeds the enumeration bound of the brute-force oracle"""


class MissingDomainError(CroDomScError, ValueError):
    """Source or target domain has no samples"""


class NoLabeledSamplesError(CroDomScError, ValueError):
    """No labeled sample available to fit class centroids"""


class EmptyInputError(CroDomScError, ValueError):
    """An operation that needs at least one item received none"""


class InvalidConfigError(CroDomScError, ValueError):
    """Configuration file or synthetic-data settings are inconsistent"""


class InvalidHyperparamsError(CroDomScError, ValueError):
    """A hyperparameter is outside its allowed range"""


class InfeasibleCodebookError(CroDomScError, ValueError):
    """A codeword violates the squared-norm bound c"""


class DatasetValidationError(CroDomScError, ValueError):
    """Dataset failed validation; carries the individual violations"""

    def __init__(self, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class ParseError(CroDomScError, ValueError):
    """Malformed input file; line and column are 1-based when known"""

    def __init__(self, message: str,
                 path: Optional[str] = None,
                 line: Optional[int] = None,
                 column: Optional[int] = None):
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.path = path
        self.line = line
        self.column = column


class VersionMismatchError(CroDomScError, ValueError):
    """Model file header does not carry the expected format version"""
