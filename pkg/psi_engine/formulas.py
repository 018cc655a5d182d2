# ============================================================================
# MODULE CONTEXT - PSI FORMULAS
# ============================================================================
# STATUS: Engine - conditional-Gaussian quadrature for each claim
# PURPOSE: P(A_c, H > 0) and E[H 1_{A_c}] in one measure's coordinates
# EXPORTS: PsiFormula, DigitalFormula, QuantoDomesticFormula, QuantoForeignFormula,
#          OutperformanceFormula, SpreadFormula, formula_for, lower_decades
# DEPENDENCIES: numpy, gaussian, market, payoffs
# ============================================================================

"""
Psi formulas.

Every claim is handled in the coordinates of one measure, described by a
``MeasureFrame``: W ~ N(0, T Q), ln S^i = log_center_i + sigma_i w_i and
ln Z~^{-1} = A . w + density_shift. The success event on {H > 0} is

    A1 w1 + A2 w2 + density_shift >= ln c + ln H(w).

``success_mass`` integrates its probability, ``payoff_mass`` integrates
H over it. Psi1 uses the physical frame plus P(H = 0); Psi2 uses the
martingale frame and discounts. ``log_c = -inf`` is the c = 0 limit and
makes every success constraint vacuous, which is how Psi2(0) = p(H).

Conditioning reduces each claim to one outer Gaussian quadrature of a
closed-form inner value:

    digital           X = A . W given Y = s1 W1 - s2 W2, over Y >= b
    quanto domestic   W2 given W1 = x, over x >= a1
    quanto foreign    W1 given Z = s1 W1 + s2 W2 = z, over z >= d
    outperformance    W2 given W1 = x on {S1 >= S2, S1 >= K}, and
                      W1 given W2 = y on {S2 > S1, S2 >= K}
    spread            W1 given W2 = y, over the interval union S(c, y)

The inner law in the outperformance case is exact: given W1 = x and
s1 W1 - s2 W2 = z the value of A2 W2 is fixed, so the inner factor is an
interval mass rather than a Phi of a conditional variance.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional, Tuple, Type

from gaussian import (
    ConditionIndex,
    GaussianVec,
    QuadratureResult,
    QuadratureSpec,
    conditional_law,
    integrate_gauss_weighted,
    integrate_nested,
    linear_law,
    normal_mass,
    truncated_exp_moment,
)
from market import MarketModel, MeasureFrame
from payoffs import Payoff, PayoffKind
from .models import IntervalUnion
from .spread_sets import spread_upper_set

logger = logging.getLogger(__name__)

# Coefficients at or below this are treated as zero.
COEF_TOL = 1e-12

# Decades of breakpoints placed above a finite outer limit.
LOWER_DECADES = 15

HalfLine = Optional[Tuple[float, float]]


def log_excess(log_x: float, log_k: float) -> float:
    """ln(e^{log_x} - e^{log_k}); -inf when the difference is not positive."""
    if not log_x > log_k:
        return -math.inf
    return log_x + math.log(-math.expm1(log_k - log_x))


def lower_decades(lower: float, scale: float) -> List[float]:
    """
    Breakpoints lower + scale * 10^-k above a finite outer limit.

    At the limit the payoff excess vanishes and ln(excess) runs to -inf
    like ln(x - lower), so the inner value can switch on inside a sliver
    of width ~ 1 / c. One piece per decade keeps that sliver sampled.
    """
    if not math.isfinite(lower) or not scale > 0.0:
        return []
    return [lower + scale * 10.0 ** -k for k in range(LOWER_DECADES)]


def half_line(coef: float, level: float) -> HalfLine:
    """{x : coef * x >= level} as (lo, hi), or None when empty."""
    if coef > COEF_TOL:
        return (level / coef, math.inf)
    if coef < -COEF_TOL:
        return (-math.inf, level / coef)
    return (-math.inf, math.inf) if level <= 0.0 else None


def _clip(interval: HalfLine, lower: float = -math.inf, upper: float = math.inf) -> HalfLine:
    if interval is None:
        return None
    lo, hi = max(interval[0], lower), min(interval[1], upper)
    return (lo, hi) if lo < hi else None


def _mass(interval: HalfLine, mean: float, var: float) -> float:
    return 0.0 if interval is None else normal_mass(mean, var, interval[0], interval[1])


def _exp_moment(beta: float, interval: HalfLine, mean: float, var: float) -> float:
    return 0.0 if interval is None else truncated_exp_moment(beta, mean, var, interval[0], interval[1])


class PsiFormula(ABC):
    """Quadrature formulas for one claim in a given market."""

    kind: PayoffKind

    def __init__(self, model: MarketModel, payoff: Payoff, spec: QuadratureSpec):
        self.model = model
        self.payoff = payoff
        self.spec = spec
        p = model.params
        self.sigma_1 = p.sigma_1
        self.sigma_2 = p.sigma_2
        self.rho = p.rho
        self.T = p.T
        self.a1 = model.measure_change.a1_const
        self.a2 = model.measure_change.a2_const
        self.strike = payoff.strike
        self.log_k = math.log(payoff.strike)
        self.cond_var = self.T * (1.0 - self.rho ** 2)
        self.brownian = GaussianVec.univariate(0.0, self.T)

    @abstractmethod
    def success_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        """P(success event and H > 0) in the frame's coordinates."""

    @abstractmethod
    def payoff_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        """E[H 1{success event}] in the frame's coordinates."""

    def _outer(self, inner: Callable[[float], float], lower: float,
               weight: Optional[GaussianVec] = None) -> QuadratureResult:
        weight = weight or self.brownian
        return integrate_nested(weight, inner, self.spec, lower=lower,
                                breakpoints=lower_decades(lower, weight.sd))


class DigitalFormula(PsiFormula):
    """H = K 1{S1 >= S2}."""

    kind = PayoffKind.DIGITAL

    def __init__(self, model: MarketModel, payoff: Payoff, spec: QuadratureSpec):
        super().__init__(model, payoff, spec)
        joint = linear_law(
            [[self.a1, self.a2], [self.sigma_1, -self.sigma_2]],
            GaussianVec([0.0, 0.0], model.covariance),
        )
        self.x_given_y = conditional_law(joint, ConditionIndex.SECOND)
        self.y_law = joint.marginal(1)

    def success_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        b = frame.log_center_2 - frame.log_center_1
        level = log_c + self.log_k - frame.density_shift
        y_var = float(self.y_law.cov[0, 0])
        law = self.x_given_y

        if level == -math.inf:
            return QuadratureResult(normal_mass(0.0, y_var, b, math.inf), 0.0)
        if law.degenerate:
            # {intercept + slope y >= level} is a half-line in y.
            interval = _clip(half_line(law.cond_mean_slope, level - law.cond_mean_intercept), lower=b)
            return QuadratureResult(_mass(interval, 0.0, y_var), 0.0)
        return integrate_gauss_weighted(
            lambda y: law.upper_tail(y, level), self.y_law, self.spec, lower=b
        )

    def payoff_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        return self.success_mass(log_c, frame).scaled(self.strike)


class QuantoDomesticFormula(PsiFormula):
    """H = S2 (S1 - K)^+; success is {(A2 - sigma2) W2 >= v(W1)}."""

    kind = PayoffKind.QUANTO_DOMESTIC

    def _inner_interval(self, log_c: float, frame: MeasureFrame, x: float) -> Tuple[HalfLine, float]:
        log_excess_1 = log_excess(frame.log_center_1 + self.sigma_1 * x, self.log_k)
        v = log_c + frame.log_center_2 + log_excess_1 - self.a1 * x - frame.density_shift
        return half_line(self.a2 - self.sigma_2, v), log_excess_1

    def success_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        lower = (self.log_k - frame.log_center_1) / self.sigma_1

        def inner(x: float) -> float:
            interval, _ = self._inner_interval(log_c, frame, x)
            return _mass(interval, self.rho * x, self.cond_var)

        return self._outer(inner, lower)

    def payoff_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        lower = (self.log_k - frame.log_center_1) / self.sigma_1

        def inner(x: float) -> float:
            interval, log_excess_1 = self._inner_interval(log_c, frame, x)
            if log_excess_1 == -math.inf:
                return 0.0
            moment = _exp_moment(self.sigma_2, interval, self.rho * x, self.cond_var)
            return math.exp(log_excess_1 + frame.log_center_2) * moment

        return self._outer(inner, lower)


class QuantoForeignFormula(PsiFormula):
    """H = (S1 - K / S2)^+; success is {kappa W1 + lambda Z >= v(Z)}."""

    kind = PayoffKind.QUANTO_FOREIGN

    def __init__(self, model: MarketModel, payoff: Payoff, spec: QuadratureSpec):
        super().__init__(model, payoff, spec)
        joint = linear_law([[1.0, 0.0], [self.sigma_1, self.sigma_2]],
                           GaussianVec([0.0, 0.0], model.covariance))
        self.w1_given_z = conditional_law(joint, ConditionIndex.SECOND)
        self.z_law = joint.marginal(1)
        shifted = self.a2 + self.sigma_2
        self.kappa = self.a1 - shifted * self.sigma_1 / self.sigma_2
        self.lam = shifted / self.sigma_2

    def _inner_interval(self, log_c: float, frame: MeasureFrame, z: float) -> Tuple[HalfLine, float]:
        log_excess_12 = log_excess(frame.log_center_1 + frame.log_center_2 + z, self.log_k)
        v = log_c - frame.log_center_2 - frame.density_shift + log_excess_12
        return half_line(self.kappa, v - self.lam * z), log_excess_12

    def success_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        lower = self.log_k - frame.log_center_1 - frame.log_center_2
        law = self.w1_given_z

        def inner(z: float) -> float:
            interval, _ = self._inner_interval(log_c, frame, z)
            return _mass(interval, law.mean_at(z), law.cond_var)

        return self._outer(inner, lower, self.z_law)

    def payoff_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        lower = self.log_k - frame.log_center_1 - frame.log_center_2
        law = self.w1_given_z

        def inner(z: float) -> float:
            interval, log_excess_12 = self._inner_interval(log_c, frame, z)
            if log_excess_12 == -math.inf:
                return 0.0
            # H = (S1 S2 - K) / S2 and 1 / S2 = exp(-log_center_2 - z + sigma1 W1).
            moment = _exp_moment(self.sigma_1, interval, law.mean_at(z), law.cond_var)
            return math.exp(log_excess_12 - frame.log_center_2 - z) * moment

        return self._outer(inner, lower, self.z_law)


class OutperformanceFormula(PsiFormula):
    """H = (max(S1, S2) - K)^+, split on which asset is larger."""

    kind = PayoffKind.OUTPERFORMANCE

    def _first_leg(self, log_c: float, frame: MeasureFrame, x: float) -> Tuple[HalfLine, float]:
        # S1 >= S2 and S1 >= K, W1 = x; constraints on W2.
        b = frame.log_center_2 - frame.log_center_1
        log_excess_1 = log_excess(frame.log_center_1 + self.sigma_1 * x, self.log_k)
        v1 = log_c + log_excess_1 - self.a1 * x - frame.density_shift
        interval = _clip(half_line(self.a2, v1), upper=(self.sigma_1 * x - b) / self.sigma_2)
        return interval, log_excess_1

    def _second_leg(self, log_c: float, frame: MeasureFrame, y: float) -> Tuple[HalfLine, float]:
        # S2 > S1 and S2 >= K, W2 = y; constraints on W1.
        b = frame.log_center_2 - frame.log_center_1
        log_excess_2 = log_excess(frame.log_center_2 + self.sigma_2 * y, self.log_k)
        v2 = log_c + log_excess_2 - self.a2 * y - frame.density_shift
        interval = _clip(half_line(self.a1, v2), upper=(self.sigma_2 * y + b) / self.sigma_1)
        return interval, log_excess_2

    def _legs(self, log_c: float, frame: MeasureFrame, weighted: bool) -> QuadratureResult:
        lower_1 = (self.log_k - frame.log_center_1) / self.sigma_1
        lower_2 = (self.log_k - frame.log_center_2) / self.sigma_2

        def inner_1(x: float) -> float:
            interval, log_excess_1 = self._first_leg(log_c, frame, x)
            mass = _mass(interval, self.rho * x, self.cond_var)
            return math.exp(log_excess_1) * mass if weighted else mass

        def inner_2(y: float) -> float:
            interval, log_excess_2 = self._second_leg(log_c, frame, y)
            mass = _mass(interval, self.rho * y, self.cond_var)
            return math.exp(log_excess_2) * mass if weighted else mass

        return self._outer(inner_1, lower_1) + self._outer(inner_2, lower_2)

    def success_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        return self._legs(log_c, frame, weighted=False)

    def payoff_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        return self._legs(log_c, frame, weighted=True)


class SpreadFormula(PsiFormula):
    """H = (S1 - S2 - K)^+; W1 given W2 = y over S(c, y) above e(y)."""

    kind = PayoffKind.SPREAD

    def _inner_set(self, log_c: float, frame: MeasureFrame, y: float) -> Tuple[IntervalUnion, float]:
        s2_plus_k = math.exp(frame.log_center_2 + self.sigma_2 * y) + self.strike
        boundary = (math.log(s2_plus_k) - frame.log_center_1) / self.sigma_1
        if log_c == -math.inf:
            region = IntervalUnion.full()
        else:
            region = spread_upper_set(self.model, math.exp(log_c), y, frame.measure, self.strike)
        return region.intersect(boundary, math.inf), s2_plus_k

    def success_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        def inner(y: float) -> float:
            region, _ = self._inner_set(log_c, frame, y)
            return region.mass(self.rho * y, self.cond_var)

        return self._outer(inner, -math.inf)

    def payoff_mass(self, log_c: float, frame: MeasureFrame) -> QuadratureResult:
        scale = math.exp(frame.log_center_1)

        def inner(y: float) -> float:
            region, s2_plus_k = self._inner_set(log_c, frame, y)
            if region.is_empty:
                return 0.0
            mean = self.rho * y
            value = (scale * region.exp_moment(self.sigma_1, mean, self.cond_var)
                     - s2_plus_k * region.mass(mean, self.cond_var))
            return max(value, 0.0)

        return self._outer(inner, -math.inf)


_FORMULAS: Dict[PayoffKind, Type[PsiFormula]] = {
    PayoffKind.DIGITAL: DigitalFormula,
    PayoffKind.QUANTO_DOMESTIC: QuantoDomesticFormula,
    PayoffKind.QUANTO_FOREIGN: QuantoForeignFormula,
    PayoffKind.OUTPERFORMANCE: OutperformanceFormula,
    PayoffKind.SPREAD: SpreadFormula,
}


def formula_for(model: MarketModel, payoff: Payoff, spec: QuadratureSpec) -> PsiFormula:
    return _FORMULAS[payoff.kind](model, payoff, spec)
