"""
Psi engine: anchors, limits, monotonicity, degenerate closed forms,
success-set predicates, spread sets and Monte Carlo cross-checks.
"""

import math

import numpy as np
import pytest

from exceptions import InvalidParameter, MonotonicityViolation
from gaussian import std_normal_cdf
from market import Measure, new_market
from mc_oracle import mc_psi, sample_terminal
from payoffs import new_payoff, price, prob_zero_payoff, spread_exercise_boundary, weighted_payoff
from psi_engine import (
    IntervalUnion,
    PsiValue,
    log_excess,
    psi1,
    psi2,
    psi_curve,
    spread_inequality,
    spread_upper_set,
    success_set,
)
from psi_engine.formulas import lower_decades
from psi_engine.service import _check_nonincreasing

from conftest import BASELINE, log_grid


# ----------------------------------------------------------------------
# Anchors and limits
# ----------------------------------------------------------------------

def test_psi1_at_zero_is_exactly_one(baseline, any_payoff):
    assert psi1(baseline, any_payoff, 0.0).value == 1.0


def test_psi2_at_zero_is_the_price(baseline, any_payoff):
    assert psi2(baseline, any_payoff, 0.0).value == price(baseline, any_payoff)


def test_infinite_level(baseline, any_payoff):
    assert psi1(baseline, any_payoff, math.inf).value == pytest.approx(prob_zero_payoff(baseline, any_payoff))
    assert psi2(baseline, any_payoff, math.inf).value == 0.0


@pytest.mark.parametrize("c", [-1.0, math.nan])
def test_negative_level_rejected(baseline, digital, c):
    with pytest.raises(InvalidParameter):
        psi1(baseline, digital, c)
    with pytest.raises(InvalidParameter):
        psi2(baseline, digital, c)


def test_large_level_limits(baseline, any_payoff):
    p = price(baseline, any_payoff)
    c = 1e9 / p
    assert abs(psi1(baseline, any_payoff, c).value - prob_zero_payoff(baseline, any_payoff)) < 1e-5
    assert psi2(baseline, any_payoff, c).value < 1e-6 * p


def test_values_stay_in_range(baseline, any_payoff):
    p = price(baseline, any_payoff)
    for c in log_grid(p, 5):
        v1 = psi1(baseline, any_payoff, c).value
        v2 = psi2(baseline, any_payoff, c).value
        assert 0.0 <= v1 <= 1.0
        assert 0.0 <= v2 <= p * (1.0 + 1e-9)


def test_lower_decades_hug_the_limit():
    points = lower_decades(2.0, 0.5)
    assert points[0] == 2.5
    assert all(b > a for a, b in zip(points[1:], points[:-1]))
    assert points[-1] - 2.0 == pytest.approx(0.5e-14, rel=0.2)
    assert lower_decades(-math.inf, 0.5) == []


def test_quanto_foreign_keeps_mass_next_to_the_strike_edge(baseline):
    # At high levels the success set on {H > 0} shrinks to a sliver where
    # S1 S2 is just above K; it must not vanish from the integral.
    payoff = new_payoff("quanto-for", 10000.0)
    p = price(baseline, payoff)
    zero = prob_zero_payoff(baseline, payoff)
    by_level = {k: (psi1(baseline, payoff, k / p), psi2(baseline, payoff, k / p)) for k in (50.0, 60.0, 100.0)}
    for v1, v2 in by_level.values():
        assert v1.value - zero > 1e-4
        assert v2.value > 1e-6 * p
    assert by_level[100.0][1].value > 0.1 * by_level[50.0][1].value
    assert by_level[100.0][0].value <= by_level[60.0][0].value <= by_level[50.0][0].value


@pytest.mark.slow
def test_quanto_foreign_high_level_matches_monte_carlo(baseline):
    payoff = new_payoff("quanto-for", 10000.0)
    c = 100.0 / price(baseline, payoff)
    est_1, est_2 = mc_psi(baseline, payoff, c, 1_000_000, 41)
    v1 = psi1(baseline, payoff, c)
    v2 = psi2(baseline, payoff, c)
    assert est_1.agrees_with(v1.value, 3.0, v1.est_error)
    assert est_2.agrees_with(v2.value, 3.0, v2.est_error)


# ----------------------------------------------------------------------
# Monotonicity
# ----------------------------------------------------------------------

def test_psi_curve_is_nonincreasing(baseline, any_payoff):
    grid = log_grid(price(baseline, any_payoff), 12)
    curve = psi_curve(baseline, any_payoff, grid)
    frame = curve.to_frame()
    assert list(frame.columns) == ["c", "psi1", "psi1_error", "psi2", "psi2_error", "method"]
    assert (np.diff(frame["psi1"]) <= 1e-8).all()
    assert (np.diff(frame["psi2"]) <= 1e-8 * frame["psi2"].iloc[0]).all()
    assert (frame["method"] == "quadrature").all()


@pytest.mark.slow
@pytest.mark.parametrize("payoff_kind, strike", [
    ("digital", 100.0), ("quanto-dom", 100.0), ("quanto-for", 10000.0), ("outperf", 100.0), ("spread", 5.0),
])
def test_fifty_point_monotonicity(baseline, payoff_kind, strike):
    payoff = new_payoff(payoff_kind, strike)
    psi_curve(baseline, payoff, log_grid(price(baseline, payoff), 50))


def test_psi_curve_rejects_unsorted_grid(baseline, digital):
    with pytest.raises(InvalidParameter):
        psi_curve(baseline, digital, [0.02, 0.01])
    with pytest.raises(InvalidParameter):
        psi_curve(baseline, digital, [])


def test_monotonicity_violation_names_the_pair():
    values = [PsiValue(0.5, 1e-12), PsiValue(0.6, 1e-12)]
    with pytest.raises(MonotonicityViolation) as info:
        _check_nonincreasing([1.0, 2.0], values, "psi1")
    assert info.value.pair == (1.0, 2.0)


# ----------------------------------------------------------------------
# Degenerate market
# ----------------------------------------------------------------------

@pytest.mark.parametrize("ck", [0.25, 0.999, 1.001, 4.0, 1e6])
def test_degenerate_digital_closed_form(degenerate, digital, ck):
    c = ck / digital.strike
    p = degenerate.params
    sd = math.sqrt(p.T * (p.sigma_1 ** 2 - 2 * p.rho * p.sigma_1 * p.sigma_2 + p.sigma_2 ** 2))
    b = degenerate.thresholds(digital.strike).b
    expected = 1.0 if ck <= 1.0 else std_normal_cdf(b / sd)
    assert psi1(degenerate, digital, c).value == pytest.approx(expected, abs=1e-10)


def test_degenerate_digital_frequency(degenerate, digital):
    # cK > 1: only points with H = 0, that is S1 < S2, are in the set.
    est_1, est_2 = mc_psi(degenerate, digital, 2.0 / digital.strike, 100_000, 3)
    w1, w2 = sample_terminal(degenerate, 100_000, 3, Measure.PHYSICAL)
    s1, s2 = degenerate.terminal_assets(w1, w2)
    assert est_1.mean == pytest.approx(float(np.mean(s1 < s2)), abs=1e-12)
    assert est_2.mean == 0.0


# ----------------------------------------------------------------------
# Success sets
# ----------------------------------------------------------------------

def test_success_set_boundaries(baseline, digital):
    w1, w2 = np.array([0.5, -1.0, 2.0]), np.array([0.1, 1.5, -0.3])
    assert success_set(baseline, digital, 0.0).contains(w1, w2).all()
    s1, s2 = baseline.terminal_assets(w1, w2)
    np.testing.assert_array_equal(success_set(baseline, digital, math.inf).contains(w1, w2), s1 < s2)


def test_success_set_coordinate_systems_agree(baseline, any_payoff):
    rng = np.random.default_rng(5)
    w1, w2 = rng.normal(size=500), rng.normal(size=500)
    tilde = baseline.martingale_shift(w1, w2)
    region = success_set(baseline, any_payoff, 1.0 / price(baseline, any_payoff))
    np.testing.assert_array_equal(region.contains(w1, w2), region.contains_martingale(*tilde))


def test_success_set_is_the_weighted_payoff_sublevel(baseline, any_payoff):
    rng = np.random.default_rng(9)
    w1, w2 = rng.normal(size=400), rng.normal(size=400)
    c = 2.0 / price(baseline, any_payoff)
    direct = weighted_payoff(baseline, any_payoff, w1, w2) * c <= 1.0
    np.testing.assert_array_equal(success_set(baseline, any_payoff, c).contains(w1, w2), direct)


# ----------------------------------------------------------------------
# Spread sets
# ----------------------------------------------------------------------

def test_log_excess():
    assert log_excess(math.log(5.0), math.log(2.0)) == pytest.approx(math.log(3.0))
    assert log_excess(1.0, 1.0) == -math.inf
    assert log_excess(0.0, 1.0) == -math.inf


def test_interval_union_normalizes():
    union = IntervalUnion(((2.0, 3.0), (-1.0, 0.5), (0.4, 1.0), (5.0, 5.0)))
    assert union.intervals == ((-1.0, 1.0), (2.0, 3.0))
    assert union.contains(0.9) and not union.contains(1.5)
    assert IntervalUnion.full().is_full and IntervalUnion.empty().is_empty
    assert union.intersect(0.0, 2.5).intervals == ((0.0, 1.0), (2.0, 2.5))


@pytest.mark.parametrize("market", [
    BASELINE,                                          # A1 > sigma1
    dict(BASELINE, alpha_1=0.05, alpha_2=0.05),        # A1 = 0 < sigma1
    dict(BASELINE, alpha_1=0.09, rho=0.0),             # A1 = sigma1
    dict(BASELINE, alpha_1=0.3, rho=-0.4),             # A1 >> sigma1
], ids=["wide", "below", "equal", "steep"])
def test_spread_set_matches_direct_inequality(market):
    model = new_market(market)
    rng = np.random.default_rng(17)
    strike = 5.0
    x = np.linspace(-10.0, 10.0, 1001)
    for c, y in zip(np.exp(rng.uniform(-12.0, 2.0, 300)), rng.normal(0.0, 1.0, 300)):
        region = spread_upper_set(model, float(c), float(y), Measure.PHYSICAL, strike)
        ends = np.array([e for piece in region.intervals for e in piece if math.isfinite(e)])
        mask = np.ones(x.shape, dtype=bool)
        if ends.size:
            mask = np.min(np.abs(x[:, None] - ends[None, :]), axis=1) > 1e-10 * (1.0 + np.abs(x))
        direct = spread_inequality(model, strike, float(c), float(y), x[mask], Measure.PHYSICAL)
        np.testing.assert_array_equal(region.contains(x[mask]), direct)


def test_spread_set_contains_region_below_exercise(baseline):
    y = 0.2
    e = spread_exercise_boundary(baseline, 5.0, y, Measure.PHYSICAL)
    region = spread_upper_set(baseline, 0.05, y, Measure.PHYSICAL, 5.0)
    assert region.contains(np.linspace(e - 5.0, e, 50)).all()


def test_spread_set_edge_levels(baseline):
    assert spread_upper_set(baseline, 0.0, 0.3, Measure.PHYSICAL, 5.0).is_full
    with pytest.raises(InvalidParameter):
        spread_upper_set(baseline, -1.0, 0.3, Measure.PHYSICAL, 5.0)


# ----------------------------------------------------------------------
# Monte Carlo cross-check
# ----------------------------------------------------------------------

def test_quadrature_matches_monte_carlo(baseline, any_payoff):
    c = 1.0 / price(baseline, any_payoff)
    est_1, est_2 = mc_psi(baseline, any_payoff, c, 200_000, 21)
    v1 = psi1(baseline, any_payoff, c)
    v2 = psi2(baseline, any_payoff, c)
    assert est_1.agrees_with(v1.value, 3.0, v1.est_error)
    assert est_2.agrees_with(v2.value, 3.0, v2.est_error)


@pytest.mark.slow
@pytest.mark.parametrize("market", [
    BASELINE,
    dict(BASELINE, rho=-0.6, alpha_1=0.02),
    dict(BASELINE, sigma_1=0.35, sigma_2=0.15, T=2.0, alpha_2=0.15),
], ids=["baseline", "negative-rho", "long-dated"])
def test_quadrature_matches_monte_carlo_on_grid(market, any_payoff):
    model = new_market(market)
    p = price(model, any_payoff)
    for c in log_grid(p, 8, -2.0, 2.0):
        est_1, est_2 = mc_psi(model, any_payoff, c, 1_000_000, 33)
        v1 = psi1(model, any_payoff, c)
        v2 = psi2(model, any_payoff, c)
        assert est_1.agrees_with(v1.value, 3.0, v1.est_error)
        assert est_2.agrees_with(v2.value, 3.0, v2.est_error)
