# ============================================================================
# MODULE CONTEXT - NORMAL DISTRIBUTION FUNCTIONS
# ============================================================================
# STATUS: Foundation - closed-form Gaussian algebra
# PURPOSE: Phi, bivariate Phi, affine images, conditioning, interval masses,
#          truncated exponential moments
# EXPORTS: std_normal_cdf, bivariate_normal_cdf, linear_law, conditional_law,
#          normal_mass, truncated_exp_moment
# DEPENDENCIES: numpy, scipy.special, scipy.integrate
# ============================================================================

"""
Normal distribution functions.

The bivariate CDF uses the single-integral reduction

    Phi2(x, y; rho) = Phi(x) Phi(y)
        + 1/(2 pi) * int_0^{asin rho} exp(-(x^2 - 2 x y sin t + y^2) / (2 cos^2 t)) dt

integrated with scipy's adaptive quadrature, which keeps the accuracy
uniform for |rho| <= 0.99.
"""

import logging
import math
from typing import Union

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from exceptions import DegenerateConditioning, DimensionMismatch, InvalidCorrelation
from .models import ConditionIndex, ConditionalLaw, GaussianVec, ZERO_VARIANCE

logger = logging.getLogger(__name__)

_INV_2PI = 1.0 / (2.0 * math.pi)


def std_normal_cdf(x):
    """Phi(x); scalars in, float out; arrays are passed through."""
    result = ndtr(x)
    if np.ndim(result) == 0:
        return float(result)
    return result


def bivariate_normal_cdf(x: float, y: float, rho: float) -> float:
    """P(Z1 <= x, Z2 <= y) for standard normals with correlation rho."""
    if not -1.0 < rho < 1.0 or math.isnan(rho):
        raise InvalidCorrelation(f"rho must lie in (-1, 1), got {rho}")
    if x == -math.inf or y == -math.inf:
        return 0.0
    if x == math.inf:
        return std_normal_cdf(y)
    if y == math.inf:
        return std_normal_cdf(x)

    base = std_normal_cdf(x) * std_normal_cdf(y)
    if rho == 0.0:
        return base

    def integrand(t: float) -> float:
        s = math.sin(t)
        c2 = math.cos(t) ** 2
        return math.exp(-(x * x - 2.0 * x * y * s + y * y) / (2.0 * c2))

    correction, _ = integrate.quad(integrand, 0.0, math.asin(rho), epsabs=1e-14, epsrel=1e-12, limit=200)
    return float(min(1.0, max(0.0, base + _INV_2PI * correction)))


def linear_law(matrix, law: GaussianVec) -> GaussianVec:
    """Law of A X for X ~ N(m, S): N(A m, A S A^T)."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    if a.shape[1] != law.dim or a.shape[0] not in (1, 2):
        raise DimensionMismatch(f"matrix shape {a.shape} does not act on a {law.dim}-dim law")
    return GaussianVec(a @ law.mean, a @ law.cov @ a.T)


def conditional_law(joint: GaussianVec, condition_index: Union[ConditionIndex, str]) -> ConditionalLaw:
    """
    Law of the other coordinate of a bivariate normal given the conditioned one:
    mean m_o + (s_oc / s_cc)(y - m_c), variance s_oo - s_oc^2 / s_cc.
    """
    if joint.dim != 2:
        raise DimensionMismatch("conditional_law needs a bivariate law")
    c = ConditionIndex(condition_index).position
    o = 1 - c
    s_cc = float(joint.cov[c, c])
    if s_cc <= ZERO_VARIANCE * max(1.0, float(np.max(np.abs(joint.cov)))):
        raise DegenerateConditioning(
            "conditioning coordinate has zero variance",
            {"variance": s_cc, "condition_index": ConditionIndex(condition_index).value},
        )
    s_oc = float(joint.cov[o, c])
    s_oo = float(joint.cov[o, o])
    slope = s_oc / s_cc
    cond_var = s_oo - s_oc * slope
    # Rounding can push an exact zero slightly negative.
    if cond_var < ZERO_VARIANCE * max(1.0, s_oo):
        cond_var = 0.0
    return ConditionalLaw(
        cond_mean_intercept=float(joint.mean[o]) - slope * float(joint.mean[c]),
        cond_mean_slope=slope,
        cond_var=cond_var,
    )


def normal_mass(mean: float, var: float, lower: float, upper: float) -> float:
    """P(lower <= X <= upper) for X ~ N(mean, var); var = 0 is a point mass."""
    if not lower < upper:
        if lower == upper and var <= ZERO_VARIANCE and lower == mean:
            return 1.0
        return 0.0
    if var <= ZERO_VARIANCE:
        return 1.0 if lower <= mean <= upper else 0.0
    s = math.sqrt(var)
    zl = (lower - mean) / s
    zu = (upper - mean) / s
    # Upper tails keep relative precision when the interval is far right.
    if zl > 0.0:
        mass = ndtr(-zl) - ndtr(-zu)
    else:
        mass = ndtr(zu) - ndtr(zl)
    return float(max(mass, 0.0))


def truncated_exp_moment(beta: float, mean: float, var: float, lower: float, upper: float) -> float:
    """
    E[exp(beta X) 1{lower <= X <= upper}] for X ~ N(mean, var)
    = exp(beta m + beta^2 v / 2) * P(lower <= N(m + beta v, v) <= upper).
    """
    if var <= ZERO_VARIANCE:
        return math.exp(beta * mean) if lower <= mean <= upper else 0.0
    mass = normal_mass(mean + beta * var, var, lower, upper)
    if mass <= 0.0:
        return 0.0
    return math.exp(beta * mean + 0.5 * beta * beta * var + math.log(mass))
