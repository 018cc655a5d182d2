# ============================================================================
# MODULE CONTEXT - PSI ENGINE SERVICE
# ============================================================================
# STATUS: Service Layer - Psi1 / Psi2 evaluation
# PURPOSE: Psi1(c) = P(A_c), Psi2(c) = E~[e^{-rT} H 1_{A_c}], success sets, curves
# EXPORTS: success_set, psi1, psi2, psi_curve
# DEPENDENCIES: gaussian, market, payoffs, psi_engine.formulas
# ENTRY_POINTS: psi1(model, payoff, c), psi_curve(model, payoff, grid)
# ============================================================================

"""
Psi engine service.

c = 0 is handled symbolically (A_0 is the whole space, Psi1 = 1 exactly)
and c = inf gives A_inf = {H = 0}. Every finite positive c goes through
the claim's quadrature formula; a quadrature that misses its tolerance
raises ToleranceNotMet carrying the best estimate.
"""

import math
from typing import Optional, Sequence

from exceptions import InvalidParameter, MonotonicityViolation, ToleranceNotMet
from gaussian import QuadratureResult, QuadratureSpec
from market import MarketModel, Measure
from payoffs import Payoff, prob_zero_payoff_result
from util_logger import ComponentType, LoggerFactory
from .formulas import formula_for
from .models import PsiCurve, PsiValue, SuccessSet

logger = LoggerFactory.create_logger(ComponentType.ENGINE, "psi")

# Floating slack on top of the quadrature errors in the monotonicity scan.
_MONOTONE_SLACK = 1e-12


def _check_level(c: float) -> float:
    c = float(c)
    if math.isnan(c) or c < 0.0:
        raise InvalidParameter(f"level c must be nonnegative, got {c}")
    return c


def _require_converged(result: QuadratureResult, label: str, c: float) -> QuadratureResult:
    if not result.converged:
        raise ToleranceNotMet(
            f"{label}({c:g}): quadrature tolerance not met",
            estimate=result.value,
            abs_error=result.abs_error,
            details={"c": c, "message": result.message},
        )
    return result


def success_set(model: MarketModel, payoff: Payoff, c: float) -> SuccessSet:
    """A_c = {Z~_T^{-1} >= c H}; c = 0 is the whole space."""
    return SuccessSet(level=_check_level(c), payoff=payoff, model=model)


def psi1(model: MarketModel, payoff: Payoff, c: float,
         spec: Optional[QuadratureSpec] = None) -> PsiValue:
    """Psi1(c) = P(A_c) under the physical measure."""
    c = _check_level(c)
    if c == 0.0:
        return PsiValue(1.0, 0.0)
    spec = spec or QuadratureSpec()
    zero = prob_zero_payoff_result(model, payoff, spec)
    if math.isinf(c):
        return PsiValue(zero.value, zero.abs_error)

    formula = formula_for(model, payoff, spec)
    part = _require_converged(
        formula.success_mass(math.log(c), model.frame(Measure.PHYSICAL)), "psi1", c
    )
    total = part + zero
    value = min(1.0, max(0.0, total.value))
    return PsiValue(value, total.abs_error)


def psi2(model: MarketModel, payoff: Payoff, c: float,
         spec: Optional[QuadratureSpec] = None) -> PsiValue:
    """Psi2(c) = E~[e^{-rT} H 1_{A_c}]; Psi2(0) is the arbitrage price p(H)."""
    c = _check_level(c)
    if math.isinf(c):
        return PsiValue(0.0, 0.0)
    spec = spec or QuadratureSpec()
    log_c = math.log(c) if c > 0.0 else -math.inf
    formula = formula_for(model, payoff, spec)
    result = _require_converged(
        formula.payoff_mass(log_c, model.frame(Measure.MARTINGALE)), "psi2", c
    ).scaled(model.discount)
    return PsiValue(max(0.0, result.value), result.abs_error)


def _check_nonincreasing(c_grid: Sequence[float], values: Sequence[PsiValue], label: str) -> None:
    for i in range(len(values) - 1):
        prev, nxt = values[i], values[i + 1]
        allowance = 2.0 * (prev.est_error + nxt.est_error) + _MONOTONE_SLACK * max(1.0, abs(prev.value))
        if nxt.value > prev.value + allowance:
            raise MonotonicityViolation(
                f"{label} increased between c={c_grid[i]:g} and c={c_grid[i + 1]:g}",
                pair=(c_grid[i], c_grid[i + 1]),
                details={"values": [prev.value, nxt.value], "allowance": allowance},
            )


def psi_curve(model: MarketModel, payoff: Payoff, c_grid: Sequence[float],
              spec: Optional[QuadratureSpec] = None) -> PsiCurve:
    """
    Tabulate Psi1 and Psi2 on an increasing grid and check both are nonincreasing.

    Raises:
        InvalidParameter: grid not strictly increasing or negative
        MonotonicityViolation: a column increased beyond its error estimates
    """
    grid = [_check_level(c) for c in c_grid]
    if not grid:
        raise InvalidParameter("c grid must not be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter("c grid must be strictly increasing")

    spec = spec or QuadratureSpec()
    # Each grid point is computed independently of the others.
    values_1 = [psi1(model, payoff, c, spec) for c in grid]
    values_2 = [psi2(model, payoff, c, spec) for c in grid]
    logger.debug(
        "psi curve evaluated",
        extra={'custom_dimensions': {'payoff': payoff.kind.value, 'points': len(grid)}},
    )
    _check_nonincreasing(grid, values_1, "psi1")
    _check_nonincreasing(grid, values_2, "psi2")
    return PsiCurve(payoff=payoff, c_grid=grid, psi1=values_1, psi2=values_2)


__all__ = ["success_set", "psi1", "psi2", "psi_curve"]
