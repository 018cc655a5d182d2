# ============================================================================
# MODULE CONTEXT - SPREAD SUCCESS SETS
# ============================================================================
# STATUS: Engine - conditional success set for the spread claim
# PURPOSE: S(c, y) = {x : a e^{A1 x} + c R(y) >= k e^{sigma1 x}} as an interval union
# EXPORTS: spread_upper_set, spread_inequality
# DEPENDENCIES: numpy, scipy.optimize, market
# ============================================================================

"""
Spread success sets.

Conditioning on W2 = y, the spread success event reads

    a e^{A1 x} + c R >= k e^{sigma1 x},
    a = e^{A2 y + shift},  R = S2(y) + K,  k = c e^{log_center_1},

with x the W1 coordinate (physical or martingale, per ``measure``). In
logs, h(x) = logaddexp(ln a + A1 x, ln(c R)) - ln k - sigma1 x >= 0, and
h'(x) = A1 p(x) - sigma1 with p in (0, 1), which fixes the shape:

    A1 > sigma1   h decreases then increases, minimum at x_hat:
                  full line if h(x_hat) >= 0, else (-inf, x1] U [x2, inf)
    A1 = sigma1   h decreases to ln a - ln k:
                  full line if a >= k, else (-inf, x0]
    A1 < sigma1   h strictly decreasing: (-inf, x0]

Roots come from scipy's brentq on analytic brackets. For x below the
exercise boundary e(y) the right side is below c R, so S(c, y) always
contains (-inf, e(y)].
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from exceptions import InvalidParameter, RootBracketFailure
from market import MarketModel, Measure
from .models import IntervalUnion

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-12
SLOPE_TOL = 1e-12
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class _SpreadTerms:
    log_a: float
    log_k: float
    log_r: float
    a1: float
    sigma_1: float

    def h(self, x):
        return np.logaddexp(self.log_a + self.a1 * x, self.log_r) - self.log_k - self.sigma_1 * x

    def h_scalar(self, x: float) -> float:
        u = self.log_a + self.a1 * x
        hi, lo = (u, self.log_r) if u >= self.log_r else (self.log_r, u)
        return hi + math.log1p(math.exp(lo - hi)) - self.log_k - self.sigma_1 * x


def _spread_terms(model: MarketModel, strike: float, c: float, y: float, measure: Measure) -> _SpreadTerms:
    p = model.params
    frame = model.frame(measure)
    log_c = math.log(c)
    log_s2 = frame.log_center_2 + p.sigma_2 * y
    return _SpreadTerms(
        log_a=model.measure_change.a2_const * y + frame.density_shift,
        log_k=log_c + frame.log_center_1,
        log_r=log_c + float(np.logaddexp(log_s2, math.log(strike))),
        a1=model.measure_change.a1_const,
        sigma_1=p.sigma_1,
    )


def spread_inequality(model: MarketModel, strike: float, c: float, y: float, x,
                      measure: Measure = Measure.PHYSICAL):
    """Direct evaluation of the defining inequality at W1 = x (vectorized in x)."""
    if c == 0.0:
        out = np.ones(np.shape(x), dtype=bool)
    else:
        out = _spread_terms(model, strike, c, y, measure).h(np.asarray(x, dtype=float)) >= 0.0
    return bool(out) if np.ndim(out) == 0 else out


def _root(h: Callable[[float], float], lo: float, hi: float, strict: bool, label: str):
    """Root of h on [lo, hi]; None when there is no sign change."""
    h_lo, h_hi = float(h(lo)), float(h(hi))
    if not (math.isfinite(h_lo) and math.isfinite(h_hi)):
        raise RootBracketFailure(
            f"{label}: non-finite boundary function on bracket",
            {"lo": lo, "hi": hi, "h_lo": h_lo, "h_hi": h_hi},
        )
    if h_lo == 0.0:
        return lo
    if h_hi == 0.0:
        return hi
    if (h_lo > 0.0) == (h_hi > 0.0):
        logger.warning(
            f"{label}: no sign change on bracket",
            extra={'custom_dimensions': {'lo': lo, 'hi': hi, 'h_lo': h_lo, 'h_hi': h_hi}},
        )
        if strict:
            raise RootBracketFailure(
                f"{label}: no sign change on bracket",
                {"lo": lo, "hi": hi, "h_lo": h_lo, "h_hi": h_hi},
            )
        return None
    return brentq(h, lo, hi, xtol=ROOT_XTOL, maxiter=200)


def spread_upper_set(model: MarketModel, c: float, y: float, measure: Measure,
                     strike: float, strict: bool = False) -> IntervalUnion:
    """
    S(c, y) under the physical measure, or its martingale-coordinate twin.

    Args:
        model: market model
        c: level, c >= 0 (c = 0 gives the full line)
        y: conditioning value of W2 (or W~2)
        measure: coordinate convention of x and y
        strike: spread strike K
        strict: raise RootBracketFailure instead of returning the implied set

    Returns:
        IntervalUnion of W1 values in the success set
    """
    if c < 0 or math.isnan(c):
        raise InvalidParameter(f"level c must be nonnegative, got {c}")
    if c == 0.0:
        return IntervalUnion.full()

    t = _spread_terms(model, strike, c, y, Measure(measure))
    gap = t.a1 - t.sigma_1

    if gap > SLOPE_TOL:
        x_hat = (math.log(t.sigma_1 / gap) + t.log_r - t.log_a) / t.a1
        h_min = t.h_scalar(x_hat)
        if h_min >= 0.0:
            return IntervalUnion.full()
        left = min(x_hat, (t.log_r - t.log_k) / t.sigma_1) - 1.0
        right = max(x_hat, (t.log_k - t.log_a) / gap) + 1.0
        x1 = _root(t.h_scalar, left, x_hat, strict, "spread left root")
        x2 = _root(t.h_scalar, x_hat, right, strict, "spread right root")
        # A missing sign change leaves h < 0 on that side of x_hat.
        lower_piece = (-math.inf, x1 if x1 is not None else left)
        upper_piece = (x2 if x2 is not None else right, math.inf)
        return IntervalUnion((lower_piece, upper_piece))

    if abs(gap) <= SLOPE_TOL:
        if t.log_a >= t.log_k:
            return IntervalUnion.full()
        # c R e^{-sigma1 x} = k - a
        x0 = (t.log_r - t.log_k - math.log1p(-math.exp(t.log_a - t.log_k))) / t.sigma_1
        return IntervalUnion(((-math.inf, x0),))

    left = (t.log_r - t.log_k) / t.sigma_1 - 1.0
    right = max((t.log_r + _LOG2 - t.log_k) / t.sigma_1,
                (t.log_a + _LOG2 - t.log_k) / (-gap)) + 1.0
    x0 = _root(t.h_scalar, left, right, strict, "spread single root")
    if x0 is None:
        implied_full = t.h_scalar(right) >= 0.0
        return IntervalUnion.full() if implied_full else IntervalUnion(((-math.inf, left),))
    return IntervalUnion(((-math.inf, x0),))
