"""
Market model - two correlated Black-Scholes assets, the martingale
density and the Brownian thresholds every payoff formula uses.

Architecture:
    market/
    ├── models.py   # MarketParams, MeasureChange, ThresholdSet, MeasureFrame
    └── service.py  # MarketModel and functional wrappers
"""

from .models import MarketParams, Measure, MeasureChange, MeasureFrame, ThresholdSet
from .service import (
    MarketModel,
    density_at,
    measure_constants,
    new_market,
    terminal_assets,
    thresholds,
)

__all__ = [
    "MarketParams",
    "Measure",
    "MeasureChange",
    "MeasureFrame",
    "ThresholdSet",
    "MarketModel",
    "density_at",
    "measure_constants",
    "new_market",
    "terminal_assets",
    "thresholds",
]
