# ============================================================================
# MODULE CONTEXT - ERROR TAXONOMY
# ============================================================================
# STATUS: Core Infrastructure - Shared exception hierarchy
# PURPOSE: Named failure modes for the market, numerics, solver and CLI layers
# EXPORTS: QuantileHedgingError and every named error below, EXIT_BAD_INPUT,
#          EXIT_NUMERICAL_FAILURE, EXIT_VERIFICATION_FAILURE
# DEPENDENCIES: typing (stdlib only)
# PATTERNS: Exception hierarchy with standardized error dictionaries
# ENTRY_POINTS: from exceptions import InvalidParameter, ToleranceNotMet
# ============================================================================

"""
Error taxonomy for the quantile hedging toolkit.

Every error carries an ``error_type`` string and renders to the same
dictionary shape (``{"error": ..., "error_type": ..., "details": ...}``)
so the CLI can log it as structured JSON before choosing an exit code.

Exit code families:
    1 - bad input (parameters, dimensions, ranges, config files)
    2 - numerical failure (quadrature, root brackets, degenerate measure)
    3 - verification failure (raised by the CLI ``verify`` command only)
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_NUMERICAL_FAILURE = 2
EXIT_VERIFICATION_FAILURE = 3


class QuantileHedgingError(Exception):
    """Base class for every error raised by this package."""

    error_type: str = "QuantileHedgingError"
    exit_code: int = EXIT_NUMERICAL_FAILURE

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Standardized error payload for logs and CLI output."""
        return {
            "error": self.message,
            "error_type": self.error_type,
            "details": self.details,
        }


# ============================================================================
# INPUT ERRORS (exit 1)
# ============================================================================

class InvalidParameter(QuantileHedgingError, ValueError):
    """A market, payoff or numerical parameter violates its constraints."""

    error_type = "InvalidParameter"
    exit_code = EXIT_BAD_INPUT


class DimensionMismatch(QuantileHedgingError, ValueError):
    """Matrix and Gaussian vector dimensions do not conform."""

    error_type = "DimensionMismatch"
    exit_code = EXIT_BAD_INPUT


class InvalidCorrelation(QuantileHedgingError, ValueError):
    """Correlation outside the open interval (-1, 1)."""

    error_type = "InvalidCorrelation"
    exit_code = EXIT_BAD_INPUT


class OutOfRange(QuantileHedgingError, ValueError):
    """Budget or risk level outside the interior range a solver accepts."""

    error_type = "OutOfRange"
    exit_code = EXIT_BAD_INPUT


# ============================================================================
# NUMERICAL ERRORS (exit 2)
# ============================================================================

class DegenerateConditioning(QuantileHedgingError):
    """Conditioning on a coordinate with zero variance."""

    error_type = "DegenerateConditioning"


class ToleranceNotMet(QuantileHedgingError):
    """Quadrature stopped before reaching the requested tolerance."""

    error_type = "ToleranceNotMet"

    def __init__(self, message: str, estimate: float, abs_error: float,
                 details: Optional[Dict[str, Any]] = None):
        merged = {"estimate": estimate, "abs_error": abs_error, **(details or {})}
        super().__init__(message, merged)
        self.estimate = estimate
        self.abs_error = abs_error


class RootBracketFailure(QuantileHedgingError):
    """No sign change found where the success-set boundary must lie."""

    error_type = "RootBracketFailure"


class MonotonicityViolation(QuantileHedgingError):
    """A tabulated curve increased by more than its combined error estimate."""

    error_type = "MonotonicityViolation"

    def __init__(self, message: str, pair: tuple, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, {"pair": list(pair), **(details or {})})
        self.pair = pair


class DegenerateMeasure(QuantileHedgingError):
    """The weighted payoff is flat on a set of positive measure, so c is not identifiable."""

    error_type = "DegenerateMeasure"
