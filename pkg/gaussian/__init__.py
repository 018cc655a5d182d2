"""
Gaussian kit - normal distribution functions, conditional-Gaussian algebra
and the quadrature engine used by every Psi formula.

Architecture:
    gaussian/
    ├── models.py         # GaussianVec, ConditionalLaw, QuadratureSpec, QuadratureResult
    ├── distributions.py  # Phi, bivariate Phi, linear_law, conditional_law, masses
    └── quadrature.py     # integrate_gauss_weighted, integrate_nested
"""

from .models import (
    ConditionIndex,
    ConditionalLaw,
    GaussianVec,
    QuadratureResult,
    QuadratureSpec,
)
from .distributions import (
    bivariate_normal_cdf,
    conditional_law,
    linear_law,
    normal_mass,
    std_normal_cdf,
    truncated_exp_moment,
)
from .quadrature import integrate_gauss_weighted, integrate_nested

__all__ = [
    "ConditionIndex",
    "ConditionalLaw",
    "GaussianVec",
    "QuadratureResult",
    "QuadratureSpec",
    "bivariate_normal_cdf",
    "conditional_law",
    "linear_law",
    "normal_mass",
    "std_normal_cdf",
    "truncated_exp_moment",
    "integrate_gauss_weighted",
    "integrate_nested",
]
