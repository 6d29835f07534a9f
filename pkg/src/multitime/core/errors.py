"""
Multitime - Error Types

This module defines the exceptions raised by the multitime library. Every
error is a ``ValueError`` so callers that only guard against invalid input keep
working; numeric failures additionally derive from ``ArithmeticError``.
"""

from typing import Any, Optional, Tuple


class MultitimeError(ValueError):
    """Base class for all multitime errors."""

    error_code = "multitime_error"


# Validation family (CLI exit code 1)

class LatticeDomainError(MultitimeError):
    """A multi-index left N^m or overflowed its 64-bit component range."""

    error_code = "lattice_domain"

    def __init__(self, message: str, components: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.components = components


class DimensionMismatchError(MultitimeError):
    """Operands have incompatible sizes."""

    error_code = "dimension_mismatch"


class BoundaryUnavailableError(MultitimeError):
    """A boundary value was requested outside a strict boundary table."""

    error_code = "boundary_unavailable"

    def __init__(self, message: str, point: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.point = point


class IncompatibleBoundaryError(MultitimeError):
    """Boundary faces disagree where they meet."""

    error_code = "incompatible_boundary"

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class HicksParameterError(MultitimeError):
    """Samuelson-Hicks parameters violate 0 < gamma < 1 or alpha > 0."""

    error_code = "hicks_parameters"


class PeriodicityError(MultitimeError):
    """A coefficient provider is not T-diagonal-periodic on the checked window."""

    error_code = "not_periodic"

    def __init__(self, message: str, counterexample: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.counterexample = counterexample


class ContractError(MultitimeError):
    """An operation was called outside its documented preconditions."""

    error_code = "contract"


class GeneratingFunctionError(MultitimeError):
    """Generating-function data is inconsistent."""

    error_code = "generating_function"


class TruncationCapError(MultitimeError):
    """Requested series truncation exceeds the configured cap."""

    error_code = "truncation_cap"


class ConfigParseError(MultitimeError):
    """The job configuration is not valid JSON."""

    error_code = "config_parse"

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigValidationError(MultitimeError):
    """The job configuration violates a documented invariant."""

    error_code = "config_validation"


# Numeric family (CLI exit code 2)

class NumericFailure(MultitimeError, ArithmeticError):
    """Base class for failures of the numerical algorithms themselves."""

    error_code = "numeric_failure"


class SingularMatrixError(NumericFailure):
    """Matrix is singular within the elimination tolerance."""

    error_code = "singular_matrix"

    def __init__(self, message: str, pivot: float = 0.0):
        super().__init__(message)
        self.pivot = pivot


class DefectiveMatrixError(NumericFailure):
    """Matrix is not diagonalizable, so no principal root is constructed."""

    error_code = "defective_matrix"


class UnsupportedSizeError(NumericFailure):
    """Matrix is larger than the dense eigen-solver supports."""

    error_code = "unsupported_size"


class DegenerateEquationError(NumericFailure):
    """Leading coefficient of a polynomial equation vanishes."""

    error_code = "degenerate_equation"


class ConvergenceError(NumericFailure):
    """An iterative method did not converge."""

    error_code = "no_convergence"


def exit_code_for(error: BaseException) -> int:
    """
    Map an exception to the CLI exit-code contract.

    Args:
        error: Exception raised by a command

    Returns:
        1 for validation errors, 2 for numeric failures
    """
    if isinstance(error, (NumericFailure, ArithmeticError)):
        return 2
    return 1
