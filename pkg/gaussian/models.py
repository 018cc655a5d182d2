# ============================================================================
# MODULE CONTEXT - GAUSSIAN KIT MODELS
# ============================================================================
# STATUS: Foundation - value types for normal laws and quadrature settings
# PURPOSE: GaussianVec, ConditionalLaw, QuadratureSpec, QuadratureResult
# EXPORTS: ConditionIndex, GaussianVec, ConditionalLaw, QuadratureSpec, QuadratureResult
# PYDANTIC_MODELS: QuadratureSpec
# DEPENDENCIES: numpy, scipy.special, pydantic
# ============================================================================

"""
Gaussian kit value types.

``GaussianVec`` and ``ConditionalLaw`` are small immutable dataclasses
holding numpy arrays; ``QuadratureSpec`` is a validated pydantic model
whose defaults come from the application configuration.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import ndtr

from config import get_app_config
from exceptions import DimensionMismatch, InvalidParameter

# Variances at or below this are treated as exact zeros.
ZERO_VARIANCE = 1e-14


class ConditionIndex(str, Enum):
    """Which coordinate of a bivariate law is conditioned on."""
    FIRST = "first"
    SECOND = "second"

    @property
    def position(self) -> int:
        return 0 if self is ConditionIndex.FIRST else 1


@dataclass(frozen=True)
class GaussianVec:
    """
    Normal law N(mean, cov) in one or two dimensions.

    Degenerate covariances are allowed and flagged through ``degenerate``.
    """
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if mean.ndim != 1 or mean.size not in (1, 2):
            raise DimensionMismatch(f"mean must have length 1 or 2, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(
                f"cov shape {cov.shape} does not match mean length {mean.size}"
            )
        scale = max(1.0, float(np.max(np.abs(cov))))
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * scale):
            raise InvalidParameter("cov must be symmetric")
        if np.any(np.diag(cov) < -ZERO_VARIANCE * scale):
            raise InvalidParameter("cov diagonal must be nonnegative")
        if mean.size == 2 and np.linalg.det(cov) < -1e-12 * scale ** 2:
            raise InvalidParameter("cov determinant must be nonnegative")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @classmethod
    def univariate(cls, mean: float, var: float) -> "GaussianVec":
        return cls(np.array([mean]), np.array([[var]]))

    @property
    def dim(self) -> int:
        return int(self.mean.size)

    @property
    def degenerate(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.cov))))
        if self.dim == 1:
            return float(self.cov[0, 0]) <= ZERO_VARIANCE * scale
        return float(np.linalg.det(self.cov)) <= ZERO_VARIANCE * scale ** 2

    def marginal(self, index: int) -> "GaussianVec":
        return GaussianVec.univariate(float(self.mean[index]), float(self.cov[index, index]))

    @property
    def sd(self) -> float:
        """Standard deviation of a univariate law."""
        if self.dim != 1:
            raise DimensionMismatch("sd is defined for univariate laws only")
        return float(np.sqrt(max(self.cov[0, 0], 0.0)))


@dataclass(frozen=True)
class ConditionalLaw:
    """
    Law of one coordinate given the other equals y:
    N(intercept + slope * y, cond_var). The variance does not depend on y.
    """
    cond_mean_intercept: float
    cond_mean_slope: float
    cond_var: float

    def __post_init__(self):
        if self.cond_var < 0:
            raise InvalidParameter(f"cond_var must be nonnegative, got {self.cond_var}")

    @property
    def degenerate(self) -> bool:
        return self.cond_var <= ZERO_VARIANCE

    @property
    def cond_sd(self) -> float:
        return float(np.sqrt(self.cond_var))

    def mean_at(self, y: float) -> float:
        return self.cond_mean_intercept + self.cond_mean_slope * y

    def upper_tail(self, y: float, level: float) -> float:
        """P(X >= level | Y = y); an indicator when the variance vanishes."""
        m = self.mean_at(y)
        if self.degenerate:
            return 1.0 if m >= level else 0.0
        return float(ndtr((m - level) / self.cond_sd))


class QuadratureSpec(BaseModel):
    """
    Settings for Gaussian-weighted adaptive quadrature.

    The window is mean +/- trunc_sigmas * sd; Gaussian mass beyond 8.5 sd
    is below 1e-16.
    """
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(
        default_factory=lambda: get_app_config().quad_abs_tol,
        gt=0,
        description="Absolute error target"
    )
    rel_tol: float = Field(
        default_factory=lambda: get_app_config().quad_rel_tol,
        ge=0,
        description="Relative error target"
    )
    trunc_sigmas: float = Field(
        default_factory=lambda: get_app_config().quad_trunc_sigmas,
        ge=6,
        description="Half-width of the integration window in standard deviations"
    )
    max_subdivisions: int = Field(
        default_factory=lambda: get_app_config().quad_max_subdivisions,
        ge=1,
        description="Upper bound on adaptive subintervals"
    )

    def target(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass
class QuadratureResult:
    """Outcome of one quadrature; ``converged`` is False when the tolerance was not met."""
    value: float
    abs_error: float
    converged: bool = True
    n_evaluations: int = 0
    message: Optional[str] = None

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            value=self.value + other.value,
            abs_error=self.abs_error + other.abs_error,
            converged=self.converged and other.converged,
            n_evaluations=self.n_evaluations + other.n_evaluations,
            message=self.message or other.message,
        )

    def scaled(self, factor: float) -> "QuadratureResult":
        return QuadratureResult(
            value=factor * self.value,
            abs_error=abs(factor) * self.abs_error,
            converged=self.converged,
            n_evaluations=self.n_evaluations,
            message=self.message,
        )
