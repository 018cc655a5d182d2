"""
Gaussian kit: normal distribution functions, conditional laws and the
Gaussian-weighted quadrature.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from exceptions import DegenerateConditioning, DimensionMismatch, InvalidCorrelation, ToleranceNotMet
from gaussian import (
    ConditionIndex,
    GaussianVec,
    QuadratureResult,
    QuadratureSpec,
    bivariate_normal_cdf,
    conditional_law,
    integrate_gauss_weighted,
    integrate_nested,
    linear_law,
    normal_mass,
    std_normal_cdf,
    truncated_exp_moment,
)
from mc_oracle import sample_terminal


def test_std_normal_cdf_scalar_and_array():
    assert std_normal_cdf(0.0) == 0.5
    assert isinstance(std_normal_cdf(1.0), float)
    values = std_normal_cdf(np.array([-math.inf, 0.0, math.inf]))
    np.testing.assert_array_equal(values, [0.0, 0.5, 1.0])


def test_std_normal_cdf_reference_value_and_symmetry():
    assert std_normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-16)
    x = np.linspace(-10.0, 10.0, 10_000)
    np.testing.assert_allclose(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, rtol=0.0, atol=1e-15)


@pytest.mark.parametrize("rho", [-0.9, -0.5, 0.0, 0.3, 0.99])
def test_bivariate_cdf_at_origin(rho):
    expected = 0.25 + math.asin(rho) / (2.0 * math.pi)
    assert bivariate_normal_cdf(0.0, 0.0, rho) == pytest.approx(expected, abs=1e-13)


def test_bivariate_cdf_infinite_arguments():
    assert bivariate_normal_cdf(-math.inf, 1.0, 0.4) == 0.0
    assert bivariate_normal_cdf(math.inf, 0.7, 0.4) == pytest.approx(std_normal_cdf(0.7))
    assert bivariate_normal_cdf(0.2, math.inf, -0.4) == pytest.approx(std_normal_cdf(0.2))


def test_bivariate_cdf_symmetry_identity():
    # P(Z1 <= x, Z2 <= y) + P(Z1 <= x, Z2 > y) = Phi(x), with corr(Z1, -Z2) = -rho.
    x, y, rho = 0.4, -0.8, 0.6
    total = bivariate_normal_cdf(x, y, rho) + bivariate_normal_cdf(x, -y, -rho)
    assert total == pytest.approx(std_normal_cdf(x), abs=1e-13)


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5, math.nan])
def test_bivariate_cdf_rejects_bad_correlation(rho):
    with pytest.raises(InvalidCorrelation):
        bivariate_normal_cdf(0.0, 0.0, rho)


@pytest.mark.parametrize("rho", [-0.95, -0.3, 0.4, 0.9])
def test_bivariate_cdf_is_monotone_in_each_argument(rho):
    grid = np.linspace(-4.0, 4.0, 25)
    values = np.array([[bivariate_normal_cdf(x, y, rho) for y in grid] for x in grid])
    assert (np.diff(values, axis=0) >= -1e-12).all()
    assert (np.diff(values, axis=1) >= -1e-12).all()
    assert ((values >= 0.0) & (values <= 1.0)).all()


def test_bivariate_cdf_without_correlation_is_a_product():
    rng = np.random.default_rng(3)
    for x, y in rng.normal(0.0, 2.0, (50, 2)):
        assert bivariate_normal_cdf(x, y, 0.0) == pytest.approx(std_normal_cdf(x) * std_normal_cdf(y), abs=1e-16)
    # A vanishing correlation must not jump away from the product.
    assert bivariate_normal_cdf(0.7, -0.2, 1e-12) == pytest.approx(
        std_normal_cdf(0.7) * std_normal_cdf(-0.2), abs=1e-12)


def test_linear_law_transforms_mean_and_covariance():
    law = GaussianVec([1.0, -1.0], [[1.0, 0.5], [0.5, 2.0]])
    out = linear_law([[1.0, 1.0], [1.0, -1.0]], law)
    np.testing.assert_allclose(out.mean, [0.0, 2.0])
    np.testing.assert_allclose(out.cov, [[4.0, -1.0], [-1.0, 2.0]])


def test_linear_law_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        linear_law([[1.0, 2.0, 3.0]], GaussianVec([0.0, 0.0], np.eye(2)))


def test_conditional_law_of_correlated_pair():
    rho = 0.6
    joint = GaussianVec([0.0, 0.0], [[1.0, rho], [rho, 1.0]])
    law = conditional_law(joint, ConditionIndex.SECOND)
    assert law.cond_mean_slope == pytest.approx(rho)
    assert law.cond_var == pytest.approx(1.0 - rho ** 2)
    assert law.mean_at(2.0) == pytest.approx(1.2)


def _mean_with_error(samples: np.ndarray):
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(samples.size))


def test_linear_law_matches_transformed_draws():
    rng = np.random.default_rng(11)
    law = GaussianVec([0.5, -1.0], [[2.0, 0.6], [0.6, 1.0]])
    matrix = np.array([[1.5, -0.7], [0.3, 2.0]])
    out = linear_law(matrix, law)
    draws = rng.multivariate_normal(law.mean, law.cov, 1_000_000) @ matrix.T
    centred = draws - out.mean
    for i, j in ((0, 0), (0, 1), (1, 1)):
        mean, se = _mean_with_error(centred[:, i] * centred[:, j])
        assert abs(mean - out.cov[i, j]) <= 3.0 * se
    for i in (0, 1):
        mean, se = _mean_with_error(draws[:, i])
        assert abs(mean - out.mean[i]) <= 3.0 * se


def test_conditional_law_matches_regression_on_draws(baseline):
    # The digital claim's pair (A1 W1 + A2 W2, s1 W1 - s2 W2).
    change = baseline.measure_change
    matrix = np.array([[change.a1_const, change.a2_const], [0.2, -0.3]])
    joint = linear_law(matrix, GaussianVec([0.0, 0.0], baseline.covariance))
    law = conditional_law(joint, ConditionIndex.SECOND)
    w1, w2 = sample_terminal(baseline, 1_000_000, 12)
    x, y = matrix @ np.vstack([w1, w2])
    residual = x - (law.cond_mean_intercept + law.cond_mean_slope * y)
    for samples, expected in ((residual, 0.0), (residual * y, 0.0), (residual ** 2, law.cond_var)):
        mean, se = _mean_with_error(samples)
        assert abs(mean - expected) <= 3.0 * se


def test_weighted_quadrature_of_random_indicators():
    rng = np.random.default_rng(5)
    for _ in range(100):
        mean, var, t = rng.normal(0.0, 2.0), rng.uniform(0.05, 4.0), rng.normal(0.0, 3.0)
        law = GaussianVec.univariate(mean, var)
        result = integrate_gauss_weighted(lambda x, t=t: 1.0 if x >= t else 0.0, law, breakpoints=[t])
        assert result.converged
        assert result.value == pytest.approx(normal_mass(mean, var, t, math.inf), abs=1e-9)


def test_conditional_law_degenerate_variance_is_exact_zero():
    joint = GaussianVec([0.0, 0.0], [[1.0, 1.0], [1.0, 1.0]])
    law = conditional_law(joint, "first")
    assert law.cond_var == 0.0 and law.degenerate
    assert law.upper_tail(0.5, 0.4) == 1.0
    assert law.upper_tail(0.5, 0.6) == 0.0


def test_conditioning_on_zero_variance_coordinate():
    joint = GaussianVec([0.0, 0.0], [[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(DegenerateConditioning):
        conditional_law(joint, ConditionIndex.SECOND)


def test_normal_mass_far_tail_keeps_relative_precision():
    mass = normal_mass(0.0, 1.0, 30.0, math.inf)
    assert mass > 0.0
    assert mass == pytest.approx(std_normal_cdf(-30.0), rel=1e-12)


def test_normal_mass_point_mass():
    assert normal_mass(1.0, 0.0, 0.0, 2.0) == 1.0
    assert normal_mass(1.0, 0.0, 1.5, 2.0) == 0.0
    assert normal_mass(0.0, 1.0, 2.0, 1.0) == 0.0


def test_truncated_exp_moment_full_line_is_lognormal_mean():
    beta, mean, var = 0.7, 0.2, 1.5
    full = truncated_exp_moment(beta, mean, var, -math.inf, math.inf)
    assert full == pytest.approx(math.exp(beta * mean + 0.5 * beta * beta * var), rel=1e-14)


def test_truncated_exp_moment_halves_add_up():
    beta, mean, var = -0.4, 1.0, 0.8
    whole = truncated_exp_moment(beta, mean, var, -math.inf, math.inf)
    left = truncated_exp_moment(beta, mean, var, -math.inf, 0.3)
    right = truncated_exp_moment(beta, mean, var, 0.3, math.inf)
    assert left + right == pytest.approx(whole, rel=1e-13)


def test_quadrature_integrates_moments():
    law = GaussianVec.univariate(1.0, 4.0)
    assert integrate_gauss_weighted(lambda x: 1.0, law).value == pytest.approx(1.0, abs=1e-12)
    second = integrate_gauss_weighted(lambda x: (x - 1.0) ** 2, law)
    assert second.converged
    assert second.value == pytest.approx(4.0, rel=1e-9)


def test_quadrature_limits_and_breakpoints():
    law = GaussianVec.univariate(0.0, 1.0)
    half = integrate_gauss_weighted(lambda x: 1.0 if x >= 0.5 else 0.0, law, breakpoints=[0.5])
    assert half.value == pytest.approx(std_normal_cdf(-0.5), abs=1e-10)
    limited = integrate_gauss_weighted(lambda x: 1.0, law, lower=-1.0, upper=1.0)
    assert limited.value == pytest.approx(std_normal_cdf(1.0) - std_normal_cdf(-1.0), abs=1e-12)


def test_quadrature_zero_variance_weight():
    result = integrate_gauss_weighted(lambda x: x * x, GaussianVec.univariate(3.0, 0.0))
    assert result.value == 9.0 and result.abs_error == 0.0


def test_nested_quadrature_reproduces_bivariate_cdf():
    rho, x, y = 0.5, 0.3, -0.2
    cond_sd = math.sqrt(1.0 - rho ** 2)
    result = integrate_nested(
        GaussianVec.univariate(0.0, 1.0),
        lambda u: std_normal_cdf((y - rho * u) / cond_sd),
        upper=x,
    )
    assert result.value == pytest.approx(bivariate_normal_cdf(x, y, rho), abs=1e-9)


def test_strict_quadrature_raises_when_tolerance_is_out_of_reach():
    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=0.0, max_subdivisions=2)
    law = GaussianVec.univariate(0.0, 1.0)
    with pytest.raises(ToleranceNotMet):
        integrate_gauss_weighted(lambda x: abs(math.sin(40.0 * x)), law, spec, strict=True)


def test_quadrature_spec_validation():
    with pytest.raises(ValidationError):
        QuadratureSpec(trunc_sigmas=5.0)
    with pytest.raises(ValidationError):
        QuadratureSpec(abs_tol=0.0)
    assert QuadratureSpec().trunc_sigmas == 8.5


def test_quadrature_results_combine():
    a = QuadratureResult(0.25, 1e-10, n_evaluations=21)
    b = QuadratureResult(0.5, 2e-10, converged=False, message="limit")
    total = a + b
    assert total.value == 0.75 and total.abs_error == pytest.approx(3e-10)
    assert not total.converged and total.message == "limit"
    assert a.scaled(-2.0).abs_error == pytest.approx(2e-10)
