"""
Monte Carlo oracle - independent sample-mean estimators for every
quantity the quadrature engine produces, plus an exhaustive
Neyman-Pearson verifier on small discrete markets.

Architecture:
    mc_oracle/
    ├── models.py          # McEstimate, MomentAccumulator, DiscreteMarket, NPComparison
    ├── sampling.py        # counter-based correlated draws and estimators
    └── neyman_pearson.py  # 2^n subset enumeration against threshold sets
"""

from .models import DiscreteMarket, McEstimate, MomentAccumulator, NPComparison
from .sampling import (
    mc_expectation,
    mc_price,
    mc_prob_zero,
    mc_psi,
    partial_moments,
    sample_terminal,
)
from .neyman_pearson import (
    min_cost_inequality_gap,
    np_bruteforce,
    np_bruteforce_min,
    random_discrete_market,
)

__all__ = [
    "DiscreteMarket",
    "McEstimate",
    "MomentAccumulator",
    "NPComparison",
    "mc_expectation",
    "mc_price",
    "mc_prob_zero",
    "mc_psi",
    "partial_moments",
    "sample_terminal",
    "min_cost_inequality_gap",
    "np_bruteforce",
    "np_bruteforce_min",
    "random_discrete_market",
]
