"""
Payoffs: evaluation, zero-payoff probabilities, closed-form prices and the
regularity guard.
"""

import math

import numpy as np
import pytest

from exceptions import InvalidParameter
from gaussian import std_normal_cdf
from market import Measure
from mc_oracle import mc_price, mc_prob_zero
from payoffs import (
    PayoffKind,
    check_regularity,
    new_payoff,
    payoff_value,
    price,
    prob_zero_payoff,
    prob_zero_payoff_result,
    spread_exercise_boundary,
    weighted_payoff,
)

from conftest import STRIKES, symmetric_market


def _martingale_centers(model):
    frame = model.frame(Measure.MARTINGALE)
    return frame.log_center_1, frame.log_center_2


def digital_price(model, strike):
    p = model.params
    lc1, lc2 = _martingale_centers(model)
    sd = math.sqrt(p.T * (p.sigma_1 ** 2 - 2 * p.rho * p.sigma_1 * p.sigma_2 + p.sigma_2 ** 2))
    return model.discount * strike * std_normal_cdf((lc1 - lc2) / sd)


def quanto_domestic_price(model, strike):
    # S2 as numeraire tilts W1 by rho sigma2 T.
    p = model.params
    forward = p.s0_1 * math.exp((p.r + p.rho * p.sigma_1 * p.sigma_2) * p.T)
    vol = p.sigma_1 * math.sqrt(p.T)
    d1 = (math.log(forward / strike) + 0.5 * vol ** 2) / vol
    return p.s0_2 * (forward * std_normal_cdf(d1) - strike * std_normal_cdf(d1 - vol))


def quanto_foreign_price(model, strike):
    # (S1 - K / S2)^+ = (S1 S2 - K)^+ / S2, with 1 / S2 absorbed into the measure.
    p = model.params
    lc1, lc2 = _martingale_centers(model)
    var = p.T * (p.sigma_1 ** 2 + 2 * p.rho * p.sigma_1 * p.sigma_2 + p.sigma_2 ** 2)
    mean = lc1 + lc2 - p.rho * p.sigma_1 * p.sigma_2 * p.T - p.sigma_2 ** 2 * p.T
    d2 = (mean - math.log(strike)) / math.sqrt(var)
    call = math.exp(mean + 0.5 * var) * std_normal_cdf(d2 + math.sqrt(var)) - strike * std_normal_cdf(d2)
    return model.discount * math.exp(-lc2 + 0.5 * p.sigma_2 ** 2 * p.T) * call


def test_payoff_values():
    s1, s2 = np.array([120.0, 90.0, 100.0]), np.array([100.0, 95.0, 100.0])
    np.testing.assert_allclose(payoff_value(new_payoff("digital", 10.0), s1, s2), [10.0, 0.0, 10.0])
    np.testing.assert_allclose(payoff_value(new_payoff("quanto-dom", 100.0), s1, s2), [2000.0, 0.0, 0.0])
    np.testing.assert_allclose(payoff_value(new_payoff("quanto-for", 9500.0), s1, s2), [25.0, 0.0, 5.0])
    np.testing.assert_allclose(payoff_value(new_payoff("outperf", 95.0), s1, s2), [25.0, 0.0, 5.0])
    np.testing.assert_allclose(payoff_value(new_payoff("spread", 5.0), s1, s2), [15.0, 0.0, 0.0])
    assert payoff_value(new_payoff("spread", 5.0), 110.0, 100.0) == 5.0


@pytest.mark.parametrize("kind, strike", [("digital", 0.0), ("spread", -1.0), ("basket", 1.0)])
def test_new_payoff_rejects_bad_input(kind, strike):
    with pytest.raises(InvalidParameter):
        new_payoff(kind, strike)


def test_weighted_payoff_is_density_times_payoff(baseline, digital):
    w1, w2 = np.array([0.5, -0.5]), np.array([-0.2, 0.4])
    s1, s2 = baseline.terminal_assets(w1, w2)
    expected = baseline.density_at(w1, w2) * payoff_value(digital, s1, s2)
    np.testing.assert_allclose(weighted_payoff(baseline, digital, w1, w2), expected)


def test_digital_zero_probability_is_half_for_identical_assets():
    model = symmetric_market()
    assert prob_zero_payoff(model, new_payoff("digital", 100.0)) == pytest.approx(0.5, abs=1e-15)


def test_spread_boundary_is_where_exercise_starts(baseline):
    y = 0.3
    e = spread_exercise_boundary(baseline, 5.0, y, Measure.PHYSICAL)
    s1, s2 = baseline.terminal_assets(e, y)
    assert s1 == pytest.approx(s2 + 5.0, rel=1e-13)


def test_zero_probability_matches_monte_carlo(baseline, any_payoff):
    estimate = mc_prob_zero(baseline, any_payoff, 200_000, 11)
    exact = prob_zero_payoff_result(baseline, any_payoff)
    assert estimate.agrees_with(exact.value, 3.0, exact.abs_error)
    assert 0.0 < exact.value < 1.0


@pytest.mark.parametrize("kind, reference", [
    (PayoffKind.DIGITAL, digital_price),
    (PayoffKind.QUANTO_DOMESTIC, quanto_domestic_price),
    (PayoffKind.QUANTO_FOREIGN, quanto_foreign_price),
])
def test_price_matches_closed_form(baseline, kind, reference):
    strike = STRIKES[kind]
    value = price(baseline, new_payoff(kind, strike))
    assert value == pytest.approx(reference(baseline, strike), rel=1e-7)


def test_price_matches_monte_carlo(baseline, any_payoff):
    estimate = mc_price(baseline, any_payoff, 200_000, 7)
    assert estimate.agrees_with(price(baseline, any_payoff), 3.0)


def test_regularity_guard(baseline, degenerate, digital):
    assert check_regularity(baseline, digital).satisfied
    report = check_regularity(degenerate, digital)
    assert not report.satisfied and "digital" in report.reason
    assert check_regularity(degenerate, new_payoff("spread", 5.0)).satisfied


def black_scholes_call(s0, sigma, r, T, strike):
    vol = sigma * math.sqrt(T)
    d1 = (math.log(s0 / strike) + (r + 0.5 * sigma ** 2) * T) / vol
    return s0 * std_normal_cdf(d1) - strike * math.exp(-r * T) * std_normal_cdf(d1 - vol)


def test_price_does_not_depend_on_physical_drifts(baseline, degenerate, any_payoff):
    assert price(baseline, any_payoff) == pytest.approx(price(degenerate, any_payoff), rel=1e-10)


def test_digital_price_bounded_by_discounted_strike(baseline, digital):
    assert 0.0 < price(baseline, digital) <= baseline.discount * digital.strike


def test_symmetric_digital_costs_half_the_discounted_strike(digital):
    model = symmetric_market()
    assert price(model, digital) == pytest.approx(0.5 * model.discount * digital.strike, abs=1e-9)


def test_outperformance_dominates_single_asset_calls(baseline):
    strike = STRIKES[PayoffKind.OUTPERFORMANCE]
    value = price(baseline, new_payoff("outperf", strike))
    p = baseline.params
    for s0, sigma in ((p.s0_1, p.sigma_1), (p.s0_2, p.sigma_2)):
        assert value >= black_scholes_call(s0, sigma, p.r, p.T, strike) - 1e-8
