"""
Psi engine - success sets A_c and the two monotone functionals

    Psi1(c) = P(A_c)                   (success probability)
    Psi2(c) = E~[e^{-rT} H 1_{A_c}]    (cost of the modified claim)

for every supported claim.

Architecture:
    psi_engine/
    ├── models.py       # PsiValue, PsiCurve, IntervalUnion, SuccessSet
    ├── spread_sets.py  # conditional success set of the spread claim
    ├── formulas.py     # one quadrature formula per claim
    └── service.py      # success_set, psi1, psi2, psi_curve
"""

from .models import IntervalUnion, PsiCurve, PsiMethod, PsiValue, SuccessSet
from .spread_sets import spread_inequality, spread_upper_set
from .formulas import PsiFormula, formula_for, log_excess
from .service import psi1, psi2, psi_curve, success_set

__all__ = [
    "IntervalUnion",
    "PsiCurve",
    "PsiMethod",
    "PsiValue",
    "SuccessSet",
    "spread_inequality",
    "spread_upper_set",
    "PsiFormula",
    "formula_for",
    "log_excess",
    "psi1",
    "psi2",
    "psi_curve",
    "success_set",
]
