# ============================================================================
# MODULE CONTEXT - PSI ENGINE MODELS
# ============================================================================
# STATUS: Foundation - success sets, interval unions, Psi values and curves
# PURPOSE: Result and predicate types for the Psi engine
# EXPORTS: PsiMethod, PsiValue, PsiCurve, IntervalUnion, SuccessSet
# DEPENDENCIES: numpy, pandas, gaussian, market, payoffs
# ============================================================================

"""
Psi engine value types.

``SuccessSet`` is the Neyman-Pearson set A_c = {Z~_T^{-1} >= c H}. Its
predicate works on physical Brownian coordinates (``contains``) or on
martingale coordinates (``contains_martingale``), and never takes the log
of a zero payoff: points with H = 0 are members for every finite c.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from gaussian import normal_mass, truncated_exp_moment
from market import MarketModel, Measure
from payoffs import Payoff, payoff_value


class PsiMethod(str, Enum):
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class PsiValue:
    """A Psi1 or Psi2 value with its error estimate."""
    value: float
    est_error: float
    method: PsiMethod = PsiMethod.QUADRATURE


@dataclass(frozen=True)
class IntervalUnion:
    """
    Sorted, pairwise disjoint closed intervals on the extended real line.

    Construction drops empty pieces and merges overlaps, so an empty
    ``intervals`` tuple is the empty set.
    """
    intervals: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        pieces = sorted((float(lo), float(hi)) for lo, hi in self.intervals if lo < hi)
        merged: List[Tuple[float, float]] = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def full(cls) -> "IntervalUnion":
        return cls(((-math.inf, math.inf),))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @property
    def is_full(self) -> bool:
        return self.intervals == ((-math.inf, math.inf),)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            inside |= (x >= lo) & (x <= hi)
        return bool(inside) if inside.ndim == 0 else inside

    def intersect(self, lower: float, upper: float) -> "IntervalUnion":
        return IntervalUnion(tuple((max(lo, lower), min(hi, upper)) for lo, hi in self.intervals))

    def mass(self, mean: float, var: float) -> float:
        """Probability of the union under N(mean, var)."""
        return sum(normal_mass(mean, var, lo, hi) for lo, hi in self.intervals)

    def exp_moment(self, beta: float, mean: float, var: float) -> float:
        """E[exp(beta X) 1{X in union}] under N(mean, var)."""
        return sum(truncated_exp_moment(beta, mean, var, lo, hi) for lo, hi in self.intervals)


@dataclass(frozen=True)
class SuccessSet:
    """A_c = {exp(A1 w1 + A2 w2 + B T) >= c H} for a level c in [0, inf]."""
    level: float
    payoff: Payoff
    model: MarketModel = field(repr=False, compare=False)

    def _member(self, log_inverse_density, h):
        h = np.asarray(h, dtype=float)
        if self.level == 0.0:
            out = np.ones(h.shape, dtype=bool)
        elif math.isinf(self.level):
            out = h <= 0.0
        else:
            with np.errstate(divide="ignore"):
                log_rhs = math.log(self.level) + np.log(np.where(h > 0.0, h, 1.0))
            out = (h <= 0.0) | (np.asarray(log_inverse_density) >= log_rhs)
        return bool(out) if out.ndim == 0 else out

    def contains(self, w1, w2):
        """Membership at physical coordinates W_T = (w1, w2)."""
        s1, s2 = self.model.terminal_assets(w1, w2, Measure.PHYSICAL)
        h = payoff_value(self.payoff, s1, s2)
        return self._member(self.model.inverse_density_log(w1, w2, Measure.PHYSICAL), h)

    def contains_martingale(self, w1_tilde, w2_tilde):
        """Membership at martingale coordinates W~_T = (w1_tilde, w2_tilde)."""
        s1, s2 = self.model.terminal_assets(w1_tilde, w2_tilde, Measure.MARTINGALE)
        h = payoff_value(self.payoff, s1, s2)
        return self._member(
            self.model.inverse_density_log(w1_tilde, w2_tilde, Measure.MARTINGALE), h
        )


@dataclass
class PsiCurve:
    """Tabulated (c, Psi1(c), Psi2(c)) with per-point error estimates."""
    payoff: Payoff
    c_grid: Sequence[float]
    psi1: List[PsiValue]
    psi2: List[PsiValue]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "c": list(self.c_grid),
            "psi1": [v.value for v in self.psi1],
            "psi1_error": [v.est_error for v in self.psi1],
            "psi2": [v.value for v in self.psi2],
            "psi2_error": [v.est_error for v in self.psi2],
            "method": [v.method.value for v in self.psi1],
        })
