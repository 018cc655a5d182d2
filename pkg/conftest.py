"""
Shared fixtures: the baseline market, the degenerate (all drifts equal r)
market, a quadrature spec and the run-file paths under configs/.
"""

import math
from pathlib import Path

import pytest

from config import get_app_config
from gaussian import QuadratureSpec
from market import MarketParams, new_market
from payoffs import PayoffKind, new_payoff

ROOT = Path(__file__).parent

BASELINE = dict(s0_1=100.0, s0_2=100.0, alpha_1=0.10, alpha_2=0.08, sigma_1=0.2,
                sigma_2=0.3, rho=0.5, r=0.05, T=1.0)
DEGENERATE = dict(BASELINE, alpha_1=0.05, alpha_2=0.05)

# Strikes that keep every claim's price and P(H = 0) away from 0 and 1.
STRIKES = {
    PayoffKind.DIGITAL: 100.0,
    PayoffKind.QUANTO_DOMESTIC: 100.0,
    PayoffKind.QUANTO_FOREIGN: 10000.0,
    PayoffKind.OUTPERFORMANCE: 100.0,
    PayoffKind.SPREAD: 5.0,
}


@pytest.fixture(autouse=True)
def _fresh_app_config():
    get_app_config.cache_clear()
    yield
    get_app_config.cache_clear()


@pytest.fixture
def baseline_params() -> MarketParams:
    return MarketParams(**BASELINE)


@pytest.fixture
def baseline(baseline_params):
    return new_market(baseline_params)


@pytest.fixture
def degenerate():
    return new_market(DEGENERATE)


@pytest.fixture
def spec() -> QuadratureSpec:
    return QuadratureSpec()


@pytest.fixture
def digital():
    return new_payoff(PayoffKind.DIGITAL, STRIKES[PayoffKind.DIGITAL])


@pytest.fixture(params=list(PayoffKind), ids=lambda kind: kind.value)
def any_payoff(request):
    return new_payoff(request.param, STRIKES[request.param])


@pytest.fixture
def baseline_config() -> str:
    return str(ROOT / "configs" / "baseline.toml")


@pytest.fixture
def degenerate_config() -> str:
    return str(ROOT / "configs" / "degenerate.toml")


def symmetric_market():
    """Identical assets: P(S1 < S2) = 1/2."""
    return new_market(dict(BASELINE, alpha_2=0.10, sigma_2=0.2))


def log_grid(price: float, points: int, low: float = -3.0, high: float = 3.0):
    return [10.0 ** (low + (high - low) * i / (points - 1)) / price for i in range(points)]


def approx_equal(a: float, b: float, tol: float) -> bool:
    return math.isfinite(a) and abs(a - b) <= tol
