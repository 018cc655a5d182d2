"""
Payoffs - the five two-asset claims, their weighted form Z~ H, the
probability of a zero payoff and the arbitrage price.
"""

from .models import Payoff, PayoffKind, RegularityReport
from .service import (
    check_regularity,
    new_payoff,
    payoff_value,
    price,
    prob_zero_payoff,
    prob_zero_payoff_result,
    spread_exercise_boundary,
    weighted_payoff,
)

__all__ = [
    "Payoff",
    "PayoffKind",
    "RegularityReport",
    "check_regularity",
    "new_payoff",
    "payoff_value",
    "price",
    "prob_zero_payoff",
    "prob_zero_payoff_result",
    "spread_exercise_boundary",
    "weighted_payoff",
]
