# ============================================================================
# MODULE CONTEXT - QUANTILE SOLVER MODELS
# ============================================================================
# STATUS: Foundation - inputs and results of the Phi1 / Phi2 solvers
# PURPOSE: Budget and risk inputs, solver settings, branch-tagged results,
#          duality round-trip report
# EXPORTS: HedgeBudget, RiskLevel, SolverSettings, Branch, LevelSolution,
#          QuantileResult, DualityPoint, DualityReport
# PYDANTIC_MODELS: HedgeBudget, RiskLevel, SolverSettings
# DEPENDENCIES: pydantic, pandas, psi_engine
# ============================================================================

"""
Quantile solver records.

Inputs are validated pydantic models; results are plain dataclasses the
CLI turns into CSV rows.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from config import get_app_config
from payoffs import Payoff
from psi_engine import SuccessSet


class HedgeBudget(BaseModel):
    """Initial capital x available for the partial hedge."""
    model_config = ConfigDict(frozen=True)

    x: float = Field(ge=0, allow_inf_nan=False, description="Initial capital")


class RiskLevel(BaseModel):
    """Accepted shortfall probability alpha."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0, le=1, description="Shortfall probability")


class SolverSettings(BaseModel):
    """Tolerances and caps for the monotone level search."""
    model_config = ConfigDict(frozen=True)

    budget_rel_tol: float = Field(
        default_factory=lambda: get_app_config().solver_budget_rel_tol,
        gt=0,
        description="Allowed |Psi2(c) - x| as a fraction of p(H)"
    )
    risk_tol: float = Field(
        default_factory=lambda: get_app_config().solver_risk_tol,
        gt=0,
        description="Allowed |Psi1(c) - (1 - alpha)|"
    )
    bracket_cap: float = Field(
        default_factory=lambda: get_app_config().solver_bracket_cap,
        gt=1,
        description="Largest bracket end, in units of 1/p(H)"
    )
    max_iterations: int = Field(
        default_factory=lambda: get_app_config().solver_max_iterations,
        ge=10,
        description="Bisection step cap"
    )
    rel_width: float = Field(default=1e-12, gt=0, description="Relative bracket width at stop")


class Branch(str, Enum):
    """Which case of the Phi representation produced the value."""
    INTERIOR = "interior"
    FULL_HEDGE = "full_hedge"
    ZERO_BUDGET = "zero_budget"
    ZERO_COST = "zero_cost"


@dataclass(frozen=True)
class LevelSolution:
    """Smallest c whose Psi value is at or below the target, with search statistics."""
    c: float
    value: float
    target: float
    iterations: int = 0
    expansions: int = 0

    @property
    def residual(self) -> float:
        return abs(self.value - self.target)


@dataclass
class QuantileResult:
    """
    Phi1(x) or Phi2(alpha) with its level c* and the modified claim H 1_{A_c*}.

    ``modified_claim_price`` is Psi2(c*), the arbitrage price of the
    modified claim; for Phi1 it equals the budget up to solver tolerance.
    """
    value: float
    c_star: float
    branch: Branch
    modified_claim: SuccessSet = field(repr=False)
    error: float = 0.0
    modified_claim_price: float = math.nan

    @property
    def payoff(self) -> Payoff:
        return self.modified_claim.payoff


@dataclass(frozen=True)
class DualityPoint:
    alpha: float
    cost: float
    probability: float
    residual: float
    ok: bool
    note: str = ""


@dataclass
class DualityReport:
    """Phi1(Phi2(alpha)) against 1 - alpha over a grid."""
    payoff: Payoff
    tolerance: float
    points: List[DualityPoint] = field(default_factory=list)
    degenerate: bool = False
    note: Optional[str] = None

    @property
    def violations(self) -> List[DualityPoint]:
        return [p for p in self.points if not p.ok]

    @property
    def max_residual(self) -> float:
        finite = [p.residual for p in self.points if math.isfinite(p.residual)]
        return max(finite, default=0.0)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "alpha": [p.alpha for p in self.points],
            "cost": [p.cost for p in self.points],
            "probability": [p.probability for p in self.points],
            "residual": [p.residual for p in self.points],
            "ok": [p.ok for p in self.points],
            "note": [p.note for p in self.points],
        })
