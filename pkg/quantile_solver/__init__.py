"""
Quantile solver - inverts Psi2 for a hedging budget and Psi1 for a risk
level, and assembles the maximal success probability Phi1(x) and the
minimal hedging cost Phi2(alpha) with every boundary branch.

Architecture:
    quantile_solver/
    ├── models.py   # HedgeBudget, RiskLevel, SolverSettings, QuantileResult, DualityReport
    └── service.py  # QuantileSolver and functional wrappers
"""

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
from .service import (
    QuantileSolver,
    cost_reduction,
    duality_check,
    phi1,
    phi2,
    solve_c_for_budget,
    solve_c_for_risk,
    success_probability_gap,
)

__all__ = [
    "Branch",
    "DualityPoint",
    "DualityReport",
    "HedgeBudget",
    "LevelSolution",
    "QuantileResult",
    "RiskLevel",
    "SolverSettings",
    "QuantileSolver",
    "cost_reduction",
    "duality_check",
    "phi1",
    "phi2",
    "solve_c_for_budget",
    "solve_c_for_risk",
    "success_probability_gap",
]
