# ============================================================================
# MODULE CONTEXT - MARKET MODELS
# ============================================================================
# STATUS: Foundation - market parameter records
# PURPOSE: Validated two-asset Black-Scholes parameters and derived constants
# EXPORTS: Measure, MarketParams, MeasureChange, ThresholdSet, MeasureFrame
# PYDANTIC_MODELS: MarketParams
# DEPENDENCIES: pydantic, dataclasses
# ============================================================================

"""
Market model records.

``MarketParams`` is the validated input (pydantic). The derived records
are frozen dataclasses computed once by ``MarketModel``.
"""

from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class Measure(str, Enum):
    """Probability measure a Brownian coordinate is drawn under."""
    PHYSICAL = "physical"
    MARTINGALE = "martingale"


class MarketParams(BaseModel):
    """
    Two correlated geometric Brownian motions plus a money market account.

    dS^i = S^i (alpha_i dt + sigma_i dW^i), corr(W^1, W^2) = rho.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    s0_1: float = Field(gt=0, description="Initial price of asset 1")
    s0_2: float = Field(gt=0, description="Initial price of asset 2")
    alpha_1: float = Field(description="Drift of asset 1 (1/year)")
    alpha_2: float = Field(description="Drift of asset 2 (1/year)")
    sigma_1: float = Field(gt=0, description="Volatility of asset 1 (1/sqrt(year))")
    sigma_2: float = Field(gt=0, description="Volatility of asset 2 (1/sqrt(year))")
    rho: float = Field(gt=-1, lt=1, description="Correlation of the driving Brownian motions")
    r: float = Field(description="Short rate (1/year)")
    T: float = Field(gt=0, description="Maturity (years)")


@dataclass(frozen=True)
class MeasureChange:
    """
    Constants of the martingale density exp(-A1 W1 - A2 W2 - B T).

    theta_i = (alpha_i - r) / sigma_i is the market price of risk.
    """
    a1_const: float
    a2_const: float
    b_const: float
    theta_1: float
    theta_2: float


@dataclass(frozen=True)
class ThresholdSet:
    """
    Brownian-coordinate thresholds for a strike K.

    {S1 >= K} = {W1 >= a1} = {W~1 >= a1_tilde}; likewise a2;
    {S1 >= S2} = {s1 W1 - s2 W2 >= b}; {S1 S2 >= K} = {s1 W1 + s2 W2 >= d}.
    """
    a1: float
    a1_tilde: float
    a2: float
    a2_tilde: float
    b: float
    b_tilde: float
    d: float
    d_tilde: float


@dataclass(frozen=True)
class MeasureFrame:
    """
    Everything the Psi formulas need about one measure.

    Prices are ln S^i = log_center_i + sigma_i * w_i in this measure's
    coordinates, and ln Z~^{-1} = A . w + density_shift.
    """
    measure: Measure
    log_center_1: float
    log_center_2: float
    density_shift: float
