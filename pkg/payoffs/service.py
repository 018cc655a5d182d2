# ============================================================================
# MODULE CONTEXT - PAYOFF SERVICE
# ============================================================================
# STATUS: Service Layer - payoff evaluation and closed-form probabilities
# PURPOSE: H, Z~ H, P(H = 0), the arbitrage price p(H), regularity guard
# EXPORTS: new_payoff, payoff_value, weighted_payoff, prob_zero_payoff,
#          prob_zero_payoff_result, price, check_regularity
# DEPENDENCIES: numpy, pydantic, gaussian, market
# ============================================================================

"""
Payoff service.

All indicator events include their boundary ({S1 >= S2}, {S1 >= K}), so
``payoff_value`` is deterministic on ties. ``prob_zero_payoff`` works in
physical Brownian coordinates; the spread case has no single-Phi form and
is E[Phi(threshold(W2))] by one-dimensional quadrature.
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from exceptions import InvalidParameter
from gaussian import (
    GaussianVec,
    QuadratureResult,
    QuadratureSpec,
    bivariate_normal_cdf,
    integrate_gauss_weighted,
    std_normal_cdf,
)
from market import MarketModel, Measure
from .models import Payoff, PayoffKind, RegularityReport

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# |A| at or below this counts as a vanishing market price of risk.
FLAT_DENSITY_TOL = 1e-14


def new_payoff(kind: Union[PayoffKind, str], strike: float) -> Payoff:
    """Validated payoff; raises InvalidParameter."""
    try:
        return Payoff(kind=PayoffKind(kind), strike=strike)
    except (ValidationError, ValueError) as e:
        raise InvalidParameter(f"invalid payoff ({kind!r}, {strike!r}): {e}") from e


def payoff_value(payoff: Payoff, s1: ArrayLike, s2: ArrayLike) -> ArrayLike:
    """H(s1, s2); vectorized over numpy arrays."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    k = payoff.strike
    kind = payoff.kind
    if kind is PayoffKind.DIGITAL:
        value = np.where(s1 >= s2, k, 0.0)
    elif kind is PayoffKind.QUANTO_DOMESTIC:
        value = s2 * np.maximum(s1 - k, 0.0)
    elif kind is PayoffKind.QUANTO_FOREIGN:
        value = np.maximum(s1 - k / s2, 0.0)
    elif kind is PayoffKind.OUTPERFORMANCE:
        value = np.maximum(np.maximum(s1, s2) - k, 0.0)
    elif kind is PayoffKind.SPREAD:
        value = np.maximum(s1 - s2 - k, 0.0)
    else:
        raise InvalidParameter(f"unknown payoff kind {kind!r}")
    return float(value) if value.ndim == 0 else value


def weighted_payoff(model: MarketModel, payoff: Payoff, w1: ArrayLike, w2: ArrayLike) -> ArrayLike:
    """f(w) = Z~_T(w) H(S(w)) at physical coordinates; the level sets of f define A_c."""
    s1, s2 = model.terminal_assets(w1, w2, Measure.PHYSICAL)
    value = model.density_at(w1, w2) * payoff_value(payoff, s1, s2)
    return float(value) if np.ndim(value) == 0 else value


def spread_exercise_boundary(model: MarketModel, strike: float, y: float, measure: Measure) -> float:
    """e(y): the W1 value where S1 = S2(y) + K, in ``measure`` coordinates."""
    frame = model.frame(measure)
    s2 = math.exp(frame.log_center_2 + model.params.sigma_2 * y)
    return (math.log(s2 + strike) - frame.log_center_1) / model.params.sigma_1


def prob_zero_payoff_result(model: MarketModel, payoff: Payoff,
                            spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """P(H = 0) under the physical measure, with its error estimate."""
    p = model.params
    th = model.thresholds(payoff.strike)
    sqrt_t = math.sqrt(p.T)
    kind = payoff.kind

    if kind is PayoffKind.DIGITAL:
        sd = math.sqrt(p.T * (p.sigma_1 ** 2 - 2 * p.rho * p.sigma_1 * p.sigma_2 + p.sigma_2 ** 2))
        return QuadratureResult(std_normal_cdf(th.b / sd), 0.0)
    if kind is PayoffKind.QUANTO_DOMESTIC:
        return QuadratureResult(std_normal_cdf(th.a1 / sqrt_t), 0.0)
    if kind is PayoffKind.QUANTO_FOREIGN:
        sd = math.sqrt(p.T * (p.sigma_1 ** 2 + 2 * p.rho * p.sigma_1 * p.sigma_2 + p.sigma_2 ** 2))
        return QuadratureResult(std_normal_cdf(th.d / sd), 0.0)
    if kind is PayoffKind.OUTPERFORMANCE:
        return QuadratureResult(bivariate_normal_cdf(th.a1 / sqrt_t, th.a2 / sqrt_t, p.rho), 0.0)
    if kind is PayoffKind.SPREAD:
        cond_sd = math.sqrt(p.T * (1 - p.rho ** 2))

        def below_boundary(y: float) -> float:
            e = spread_exercise_boundary(model, payoff.strike, y, Measure.PHYSICAL)
            return std_normal_cdf((e - p.rho * y) / cond_sd)

        result = integrate_gauss_weighted(below_boundary, GaussianVec.univariate(0.0, p.T), spec)
        result.value = float(min(1.0, max(0.0, result.value)))
        return result
    raise InvalidParameter(f"unknown payoff kind {kind!r}")


def prob_zero_payoff(model: MarketModel, payoff: Payoff, spec: Optional[QuadratureSpec] = None) -> float:
    """P(H = 0) under the physical measure."""
    return prob_zero_payoff_result(model, payoff, spec).value


def price(model: MarketModel, payoff: Payoff, spec: Optional[QuadratureSpec] = None) -> float:
    """p(H) = E~[e^{-rT} H], evaluated as Psi2(0) so the two always agree."""
    from psi_engine import psi2

    return psi2(model, payoff, 0.0, spec).value


def check_regularity(model: MarketModel, payoff: Payoff) -> RegularityReport:
    """
    Detect the known case where Z~ H is constant on a set of positive measure.

    With A1 = A2 = 0 the digital weighted payoff equals K on a half-plane,
    so Psi1 is a step function and c is not identifiable from it.
    """
    change = model.measure_change
    flat_density = abs(change.a1_const) <= FLAT_DENSITY_TOL and abs(change.a2_const) <= FLAT_DENSITY_TOL
    if payoff.kind is PayoffKind.DIGITAL and flat_density:
        return RegularityReport(
            satisfied=False,
            reason="digital payoff with zero market price of risk: weighted payoff is constant "
                   "on {S1 >= S2}",
        )
    return RegularityReport(satisfied=True)
