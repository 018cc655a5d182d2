# ============================================================================
# MODULE CONTEXT - MARKET MODEL SERVICE
# ============================================================================
# STATUS: Service Layer - market dynamics and measure change
# PURPOSE: Martingale density, thresholds, and Brownian-to-price maps
# EXPORTS: MarketModel, new_market, measure_constants, density_at, thresholds,
#          terminal_assets
# DEPENDENCIES: numpy, pydantic
# PATTERNS: Immutable model object with thin functional wrappers
# ENTRY_POINTS: model = new_market(MarketParams(...))
# ============================================================================

"""
Market model service.

Under the physical measure P the terminal Brownian vector W_T is
N(0, T Q) with Q = [[1, rho], [rho, 1]]. The unique martingale measure
has density

    Z~_T = exp(-A1 W1 - A2 W2 - B T),  A = Q^{-1} theta,  B = theta' Q^{-1} theta / 2,

and W~ = W + theta T is again N(0, T Q) under it. Physical prices written
in W and martingale prices written in W~ are the same random variables:

    S^i = S0_i exp((alpha_i - sigma_i^2/2) T + sigma_i W^i)
        = S0_i exp((r - sigma_i^2/2) T + sigma_i W~^i).

ln 0 = -inf throughout; the success-set comparisons are done on logs and
never take the logarithm of an exact zero.
"""

import math
from typing import Tuple, Union

import numpy as np
from pydantic import ValidationError

from exceptions import InvalidParameter, QuantileHedgingError
from util_logger import ComponentType, LoggerFactory
from .models import MarketParams, Measure, MeasureChange, MeasureFrame, ThresholdSet

logger = LoggerFactory.create_logger(ComponentType.MODEL, "MarketModel")

ArrayLike = Union[float, np.ndarray]

# Allowed gap between the two forms of B, relative to the size of their terms.
MEASURE_IDENTITY_TOL = 1e-12


def _measure_change(p: MarketParams) -> MeasureChange:
    theta_1 = (p.alpha_1 - p.r) / p.sigma_1
    theta_2 = (p.alpha_2 - p.r) / p.sigma_2
    rho = p.rho
    # rho^2 - 1, factored so it keeps full precision as |rho| -> 1.
    den = (rho - 1.0) * (rho + 1.0)
    a1 = (-theta_1 + rho * theta_2) / den
    a2 = (rho * theta_1 - theta_2) / den

    # B through Q^{-1/2}: B = |Q^{-1/2} theta|^2 / 2.
    plus = 1.0 / math.sqrt(1.0 + rho)
    minus = 1.0 / math.sqrt(1.0 - rho)
    u1 = (plus + minus) * theta_1 + (plus - minus) * theta_2
    u2 = (plus - minus) * theta_1 + (plus + minus) * theta_2
    b = (u1 * u1 + u2 * u2) / 8.0

    # Both forms cancel terms as large as |theta|^2 / (1 - |rho|), the top
    # eigenvalue of Q^{-1}, so rounding is measured against that size.
    reference = 0.5 * (a1 * theta_1 + a2 * theta_2)
    scale = max(1.0, (theta_1 * theta_1 + theta_2 * theta_2) / (1.0 - abs(rho)))
    if abs(b - reference) > MEASURE_IDENTITY_TOL * scale:
        raise QuantileHedgingError(
            "measure constants inconsistent",
            {"b_display": b, "b_quadratic_form": reference, "scale": scale},
        )
    return MeasureChange(a1_const=a1, a2_const=a2, b_const=b, theta_1=theta_1, theta_2=theta_2)


class MarketModel:
    """
    Immutable two-asset market with precomputed measure-change constants.

    Usage:
        model = MarketModel(MarketParams(s0_1=100, s0_2=100, alpha_1=0.1, alpha_2=0.08,
                                         sigma_1=0.2, sigma_2=0.3, rho=0.5, r=0.05, T=1))
        model.density_at(0.0, 0.0)
    """

    def __init__(self, params: MarketParams):
        self._params = params
        self._change = _measure_change(params)
        logger.debug(
            "market model built",
            extra={'custom_dimensions': {'a1': self._change.a1_const, 'a2': self._change.a2_const,
                                         'b': self._change.b_const}},
        )

    def __repr__(self) -> str:
        return f"MarketModel({self._params!r})"

    # ------------------------------------------------------------------
    # Parameters and constants
    # ------------------------------------------------------------------

    @property
    def params(self) -> MarketParams:
        return self._params

    @property
    def measure_change(self) -> MeasureChange:
        return self._change

    @property
    def covariance(self) -> np.ndarray:
        """T * Q, the covariance of W_T (and of W~_T under the martingale measure)."""
        p = self._params
        return p.T * np.array([[1.0, p.rho], [p.rho, 1.0]])

    @property
    def discount(self) -> float:
        return math.exp(-self._params.r * self._params.T)

    def drift(self, measure: Measure) -> Tuple[float, float]:
        p = self._params
        if Measure(measure) is Measure.PHYSICAL:
            return p.alpha_1, p.alpha_2
        return p.r, p.r

    def frame(self, measure: Measure) -> MeasureFrame:
        """Log-price centers and density shift for coordinates drawn under ``measure``."""
        p = self._params
        mu_1, mu_2 = self.drift(measure)
        bt = self._change.b_const * p.T
        return MeasureFrame(
            measure=Measure(measure),
            log_center_1=math.log(p.s0_1) + (mu_1 - 0.5 * p.sigma_1 ** 2) * p.T,
            log_center_2=math.log(p.s0_2) + (mu_2 - 0.5 * p.sigma_2 ** 2) * p.T,
            density_shift=bt if Measure(measure) is Measure.PHYSICAL else -bt,
        )

    # ------------------------------------------------------------------
    # Density and coordinates
    # ------------------------------------------------------------------

    def density_at(self, w1: ArrayLike, w2: ArrayLike) -> ArrayLike:
        """Z~_T = exp(-A1 w1 - A2 w2 - B T) at physical coordinates."""
        c = self._change
        return np.exp(-c.a1_const * np.asarray(w1) - c.a2_const * np.asarray(w2)
                      - c.b_const * self._params.T)

    def inverse_density_log(self, w1: ArrayLike, w2: ArrayLike,
                            measure: Measure = Measure.PHYSICAL) -> ArrayLike:
        """ln Z~_T^{-1} from coordinates drawn under ``measure``."""
        c = self._change
        shift = self.frame(measure).density_shift
        return c.a1_const * np.asarray(w1) + c.a2_const * np.asarray(w2) + shift

    def martingale_shift(self, w1: ArrayLike, w2: ArrayLike,
                         to: Measure = Measure.MARTINGALE) -> Tuple[ArrayLike, ArrayLike]:
        """W~ = W + theta T (to=MARTINGALE) or its inverse (to=PHYSICAL)."""
        sign = 1.0 if Measure(to) is Measure.MARTINGALE else -1.0
        t = self._params.T
        return (np.asarray(w1) + sign * self._change.theta_1 * t,
                np.asarray(w2) + sign * self._change.theta_2 * t)

    def terminal_assets(self, w1: ArrayLike, w2: ArrayLike,
                        measure: Measure = Measure.PHYSICAL) -> Tuple[ArrayLike, ArrayLike]:
        """S^i = S0_i exp((mu_i - sigma_i^2/2) T + sigma_i w_i), mu = alpha or r."""
        f = self.frame(measure)
        p = self._params
        return (np.exp(f.log_center_1 + p.sigma_1 * np.asarray(w1)),
                np.exp(f.log_center_2 + p.sigma_2 * np.asarray(w2)))

    # ------------------------------------------------------------------
    # Thresholds
    # ------------------------------------------------------------------

    def thresholds(self, strike: float) -> ThresholdSet:
        """Brownian thresholds for strike K under both measures."""
        if not strike > 0:
            raise InvalidParameter(f"strike must be positive, got {strike}")
        physical = self.frame(Measure.PHYSICAL)
        martingale = self.frame(Measure.MARTINGALE)
        p = self._params
        log_k = math.log(strike)
        return ThresholdSet(
            a1=(log_k - physical.log_center_1) / p.sigma_1,
            a1_tilde=(log_k - martingale.log_center_1) / p.sigma_1,
            a2=(log_k - physical.log_center_2) / p.sigma_2,
            a2_tilde=(log_k - martingale.log_center_2) / p.sigma_2,
            b=physical.log_center_2 - physical.log_center_1,
            b_tilde=martingale.log_center_2 - martingale.log_center_1,
            d=log_k - physical.log_center_1 - physical.log_center_2,
            d_tilde=log_k - martingale.log_center_1 - martingale.log_center_2,
        )


# ============================================================================
# Functional surface
# ============================================================================

def new_market(params: Union[MarketParams, dict]) -> MarketModel:
    """Validate parameters and build the model; raises InvalidParameter."""
    if not isinstance(params, MarketParams):
        try:
            params = MarketParams(**params)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(part) for part in first.get("loc", ()))
            raise InvalidParameter(f"invalid market parameter {field}: {first.get('msg')}",
                                   {"field": field}) from e
    return MarketModel(params)


def measure_constants(model: MarketModel) -> MeasureChange:
    return model.measure_change


def density_at(model: MarketModel, w1: ArrayLike, w2: ArrayLike) -> ArrayLike:
    return model.density_at(w1, w2)


def thresholds(model: MarketModel, strike: float) -> ThresholdSet:
    return model.thresholds(strike)


def terminal_assets(model: MarketModel, w1: ArrayLike, w2: ArrayLike,
                    measure: Measure = Measure.PHYSICAL) -> Tuple[ArrayLike, ArrayLike]:
    return model.terminal_assets(w1, w2, measure)
