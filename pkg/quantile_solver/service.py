# ============================================================================
# MODULE CONTEXT - QUANTILE SOLVER SERVICE
# ============================================================================
# STATUS: Service Layer - Phi1 / Phi2 assembly
# PURPOSE: Invert Psi2 for a budget and Psi1 for a risk level, then assemble
#          the maximal success probability and the minimal hedging cost
# EXPORTS: QuantileSolver, solve_c_for_budget, solve_c_for_risk, phi1, phi2,
#          duality_check, success_probability_gap, cost_reduction
# DEPENDENCIES: pydantic, psi_engine, payoffs, util_logger
# PATTERNS: Service object with functional wrappers
# ENTRY_POINTS: QuantileSolver(model, payoff).phi2(0.05)
# ============================================================================

"""
Quantile solver.

Both Psi functions are nonincreasing in c with Psi(0) at the top
(Psi1(0) = 1, Psi2(0) = p(H)), so each equation Psi(c) = target is
solved by the same monotone search:

    1. Psi(0) within tolerance of the target            -> c = 0
    2. double c_hi from 1/p(H) until Psi(c_hi) <= target,
       giving up at bracket_cap / p(H)                  -> DegenerateMeasure
    3. bisect, halving c_hi while the lower end is 0 and
       geometrically afterwards, keeping
       Psi(lo) > target >= Psi(hi)
    4. return hi, the smallest level found; a residual
       above tolerance means Psi jumps across the target -> DegenerateMeasure

Returning the upper end of the final bracket picks the smallest c on a
flat stretch of Psi. Claims flagged by ``check_regularity`` are refused
before any search starts.
"""

import math
from typing import Callable, Iterable, Optional, Union

from pydantic import ValidationError

from exceptions import DegenerateMeasure, InvalidParameter, OutOfRange, QuantileHedgingError
from gaussian import QuadratureSpec
from market import MarketModel
from payoffs import Payoff, check_regularity, prob_zero_payoff
from psi_engine import PsiValue, psi1, psi2, success_set
from util_logger import ComponentType, LoggerFactory
from .models import (
    Branch,
    DualityPoint,
    DualityReport,
    HedgeBudget,
    LevelSolution,
    QuantileResult,
    RiskLevel,
    SolverSettings,
)

logger = LoggerFactory.create_logger(ComponentType.SOLVER, "QuantileSolver")

DUALITY_TOL = 1e-6


def _budget_value(x: Union[HedgeBudget, float]) -> float:
    if isinstance(x, HedgeBudget):
        return x.x
    try:
        return HedgeBudget(x=x).x
    except ValidationError as e:
        raise InvalidParameter(f"invalid hedge budget {x!r}", {"x": x}) from e


def _risk_value(alpha: Union[RiskLevel, float]) -> float:
    if isinstance(alpha, RiskLevel):
        return alpha.alpha
    try:
        return RiskLevel(alpha=alpha).alpha
    except ValidationError as e:
        raise InvalidParameter(f"risk level must lie in [0, 1], got {alpha!r}", {"alpha": alpha}) from e


class QuantileSolver:
    """
    Phi1 and Phi2 for one claim in one market.

    The price p(H) and P(H = 0) are computed once per solver and reused by
    every solve.

    Usage:
        solver = QuantileSolver(model, new_payoff("digital", 100.0))
        result = solver.phi2(0.05)
        result.value / solver.price
    """

    def __init__(self, model: MarketModel, payoff: Payoff,
                 spec: Optional[QuadratureSpec] = None,
                 settings: Optional[SolverSettings] = None):
        self.model = model
        self.payoff = payoff
        self.spec = spec or QuadratureSpec()
        self.settings = settings or SolverSettings()
        self._price: Optional[float] = None
        self._prob_zero: Optional[float] = None

    # ------------------------------------------------------------------
    # Cached anchors
    # ------------------------------------------------------------------

    @property
    def price(self) -> float:
        """p(H) = Psi2(0)."""
        if self._price is None:
            self._price = psi2(self.model, self.payoff, 0.0, self.spec).value
        return self._price

    @property
    def prob_zero(self) -> float:
        """P(H = 0) under the physical measure."""
        if self._prob_zero is None:
            self._prob_zero = prob_zero_payoff(self.model, self.payoff, self.spec)
        return self._prob_zero

    @property
    def prob_nonzero(self) -> float:
        return 1.0 - self.prob_zero

    def _psi1(self, c: float) -> PsiValue:
        return psi1(self.model, self.payoff, c, self.spec)

    def _psi2(self, c: float) -> PsiValue:
        return psi2(self.model, self.payoff, c, self.spec)

    def _require_regular(self) -> None:
        report = check_regularity(self.model, self.payoff)
        if not report.satisfied:
            raise DegenerateMeasure(report.reason, {"payoff": self.payoff.kind.value})

    # ------------------------------------------------------------------
    # Level search
    # ------------------------------------------------------------------

    def _smallest_level(self, psi: Callable[[float], PsiValue], target: float,
                        tol: float, label: str) -> LevelSolution:
        settings = self.settings
        at_zero = psi(0.0).value
        if at_zero <= target + tol:
            return LevelSolution(c=0.0, value=at_zero, target=target)

        start = 1.0 / self.price
        hi = start
        hi_value = psi(hi).value
        expansions = 0
        while hi_value > target:
            hi *= 2.0
            expansions += 1
            if hi > settings.bracket_cap * start:
                raise DegenerateMeasure(
                    f"{label}: Psi stays above the target up to c = {hi:g}",
                    {"target": target, "last_value": hi_value, "c_hi": hi},
                )
            hi_value = psi(hi).value
        logger.debug(
            f"{label}: bracket found",
            extra={'custom_dimensions': {'c_hi': hi, 'expansions': expansions, 'target': target}},
        )

        lo = 0.0
        iterations = 0
        while iterations < settings.max_iterations:
            if lo > 0.0 and hi - lo <= settings.rel_width * hi:
                break
            mid = 0.5 * hi if lo == 0.0 else math.sqrt(lo * hi)
            value = psi(mid).value
            iterations += 1
            if value > target:
                lo = mid
            else:
                hi, hi_value = mid, value

        solution = LevelSolution(c=hi, value=hi_value, target=target,
                                 iterations=iterations, expansions=expansions)
        logger.debug(
            f"{label}: level found",
            extra={'custom_dimensions': {'c': hi, 'residual': solution.residual,
                                         'iterations': iterations}},
        )
        if solution.residual > tol:
            raise DegenerateMeasure(
                f"{label}: Psi jumps across the target near c = {hi:g}",
                {"target": target, "value_at_c": hi_value, "lower_end": lo, "c": hi},
            )
        return solution

    def level_for_budget(self, x: Union[HedgeBudget, float]) -> LevelSolution:
        """Solve Psi2(c) = x for 0 < x < p(H)."""
        x = _budget_value(x)
        if not 0.0 < x < self.price:
            raise OutOfRange(f"budget must lie in (0, p(H)) = (0, {self.price:.12g}), got {x}",
                             {"x": x, "price": self.price})
        self._require_regular()
        tol = self.settings.budget_rel_tol * self.price
        return self._smallest_level(self._psi2, x, tol, "budget level")

    def level_for_risk(self, alpha: Union[RiskLevel, float]) -> LevelSolution:
        """Solve Psi1(c) = 1 - alpha for 0 <= alpha < P(H != 0)."""
        alpha = _risk_value(alpha)
        if alpha == 0.0:
            return LevelSolution(c=0.0, value=1.0, target=1.0)
        if not alpha < self.prob_nonzero:
            raise OutOfRange(
                f"risk level must lie in [0, P(H != 0)) = [0, {self.prob_nonzero:.12g}), got {alpha}",
                {"alpha": alpha, "prob_nonzero": self.prob_nonzero},
            )
        self._require_regular()
        return self._smallest_level(self._psi1, 1.0 - alpha, self.settings.risk_tol, "risk level")

    # ------------------------------------------------------------------
    # Phi functions
    # ------------------------------------------------------------------

    def phi1(self, x: Union[HedgeBudget, float]) -> QuantileResult:
        """Maximal success probability with budget x."""
        x = _budget_value(x)
        if x == 0.0:
            return QuantileResult(
                value=self.prob_zero, c_star=math.inf, branch=Branch.ZERO_BUDGET,
                modified_claim=success_set(self.model, self.payoff, math.inf),
                modified_claim_price=0.0,
            )
        if x >= self.price:
            return QuantileResult(
                value=1.0, c_star=0.0, branch=Branch.FULL_HEDGE,
                modified_claim=success_set(self.model, self.payoff, 0.0),
                modified_claim_price=self.price,
            )
        level = self.level_for_budget(x)
        probability = self._psi1(level.c)
        return QuantileResult(
            value=probability.value, c_star=level.c,
            branch=Branch.FULL_HEDGE if level.c == 0.0 else Branch.INTERIOR,
            modified_claim=success_set(self.model, self.payoff, level.c),
            error=probability.est_error, modified_claim_price=level.value,
        )

    def phi2(self, alpha: Union[RiskLevel, float]) -> QuantileResult:
        """Minimal hedging cost for success probability 1 - alpha."""
        alpha = _risk_value(alpha)
        if alpha >= self.prob_nonzero:
            return QuantileResult(
                value=0.0, c_star=math.inf, branch=Branch.ZERO_COST,
                modified_claim=success_set(self.model, self.payoff, math.inf),
                modified_claim_price=0.0,
            )
        if alpha == 0.0:
            return QuantileResult(
                value=self.price, c_star=0.0, branch=Branch.FULL_HEDGE,
                modified_claim=success_set(self.model, self.payoff, 0.0),
                modified_claim_price=self.price,
            )
        level = self.level_for_risk(alpha)
        cost = self._psi2(level.c)
        return QuantileResult(
            value=cost.value, c_star=level.c,
            branch=Branch.FULL_HEDGE if level.c == 0.0 else Branch.INTERIOR,
            modified_claim=success_set(self.model, self.payoff, level.c),
            error=cost.est_error, modified_claim_price=cost.value,
        )

    def duality_check(self, alpha_grid: Iterable[float], tolerance: float = DUALITY_TOL) -> DualityReport:
        """
        Compare Phi1(Phi2(alpha)) with 1 - alpha on a grid.

        Never raises for numerical trouble: out-of-range alphas and failed
        solves become violations, and a degenerate measure stops the scan
        with ``degenerate`` set.
        """
        report = DualityReport(payoff=self.payoff, tolerance=tolerance)
        for alpha in alpha_grid:
            alpha = float(alpha)
            if not 0.0 <= alpha < self.prob_nonzero:
                report.points.append(DualityPoint(
                    alpha=alpha, cost=math.nan, probability=math.nan, residual=math.inf,
                    ok=False, note="alpha outside [0, P(H != 0))",
                ))
                continue
            try:
                cost = self.phi2(alpha).value
                probability = self.phi1(cost).value
            except DegenerateMeasure as e:
                report.degenerate = True
                report.note = f"DegenerateMeasure: {e.message}"
                logger.info("duality check stopped on a degenerate measure",
                            extra={'custom_dimensions': e.to_dict()})
                break
            except QuantileHedgingError as e:
                report.points.append(DualityPoint(
                    alpha=alpha, cost=math.nan, probability=math.nan, residual=math.inf,
                    ok=False, note=f"{e.error_type}: {e.message}",
                ))
                continue
            residual = abs(probability - (1.0 - alpha))
            report.points.append(DualityPoint(
                alpha=alpha, cost=cost, probability=probability, residual=residual,
                ok=residual <= tolerance,
            ))
        return report


# ============================================================================
# Functional surface
# ============================================================================

def solve_c_for_budget(model: MarketModel, payoff: Payoff, x: Union[HedgeBudget, float],
                       spec: Optional[QuadratureSpec] = None) -> float:
    return QuantileSolver(model, payoff, spec).level_for_budget(x).c


def solve_c_for_risk(model: MarketModel, payoff: Payoff, alpha: Union[RiskLevel, float],
                     spec: Optional[QuadratureSpec] = None) -> float:
    return QuantileSolver(model, payoff, spec).level_for_risk(alpha).c


def phi1(model: MarketModel, payoff: Payoff, x: Union[HedgeBudget, float],
         spec: Optional[QuadratureSpec] = None) -> QuantileResult:
    return QuantileSolver(model, payoff, spec).phi1(x)


def phi2(model: MarketModel, payoff: Payoff, alpha: Union[RiskLevel, float],
         spec: Optional[QuadratureSpec] = None) -> QuantileResult:
    return QuantileSolver(model, payoff, spec).phi2(alpha)


def duality_check(model: MarketModel, payoff: Payoff, alpha_grid: Iterable[float],
                  spec: Optional[QuadratureSpec] = None) -> DualityReport:
    return QuantileSolver(model, payoff, spec).duality_check(alpha_grid)


def success_probability_gap(model: MarketModel, payoff: Payoff, x: Union[HedgeBudget, float],
                            spec: Optional[QuadratureSpec] = None) -> float:
    """Shortfall probability 1 - Phi1(x) left by budget x."""
    return 1.0 - phi1(model, payoff, x, spec).value


def cost_reduction(model: MarketModel, payoff: Payoff, alpha: Union[RiskLevel, float],
                   spec: Optional[QuadratureSpec] = None) -> float:
    """Fraction of p(H) saved by accepting shortfall probability alpha."""
    solver = QuantileSolver(model, payoff, spec)
    return 1.0 - solver.phi2(alpha).value / solver.price
