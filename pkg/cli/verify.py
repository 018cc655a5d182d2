# ============================================================================
# MODULE CONTEXT - VERIFICATION SUITE
# ============================================================================
# STATUS: CLI support - cross-checks behind the `verify` command
# PURPOSE: Quadrature against Monte Carlo, invariants, Psi limits, Phi
#          monotonicity and feasibility, round trips, Neyman-Pearson
#          optimality and spread-set membership
# EXPORTS: CheckStatus, CheckRow, VerificationSuite
# DEPENDENCIES: numpy, pandas, every computational package
# ============================================================================

"""
Verification suite.

Each check appends one row (check, status, value, error, detail). A row
FAILs only on a violated invariant or a Monte Carlo deviation beyond
``sigmas`` standard errors plus the quadrature error estimate; a
degenerate measure is reported as DEGENERATE and never counts as a
failure. Numerical errors raised inside a check become FAIL rows.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List

import numpy as np
import pandas as pd

from exceptions import DegenerateMeasure, QuantileHedgingError
from gaussian import QuadratureSpec, std_normal_cdf
from market import MarketModel, Measure
from mc_oracle import (
    mc_expectation,
    mc_price,
    mc_psi,
    min_cost_inequality_gap,
    np_bruteforce,
    np_bruteforce_min,
    random_discrete_market,
)
from payoffs import Payoff, PayoffKind, check_regularity
from psi_engine import psi1, psi2, psi_curve, spread_inequality, spread_upper_set
from quantile_solver import QuantileSolver, SolverSettings
from util_logger import ComponentType, LoggerFactory

logger = LoggerFactory.create_logger(ComponentType.CLI, "VerificationSuite")

MONOTONE_POINTS = 50
CROSS_CHECK_SCALES = (0.25, 1.0, 4.0, 16.0)
ROUND_TRIP_ALPHAS = (0.01, 0.05, 0.1, 0.2, 0.3)
NP_MARKETS = 50
NP_ATOMS = 12
SPREAD_PAIRS = 10_000
SPREAD_POINTS = 1000
# Points this close to an interval end are not compared.
ROOT_NEIGHBORHOOD = 1e-10
# Stand-in for c -> infinity, in units of 1/p(H).
LARGE_LEVEL = 1e9
LIMIT_PSI1_TOL = 1e-5
LIMIT_PSI2_REL_TOL = 1e-6
CLOSED_FORM_TOL = 1e-10
CLOSED_FORM_LEVELS = (0.25, 0.999, 1.001, 4.0, 1e6)
BUDGET_FRACTIONS = (0.1, 0.25, 0.5, 0.75, 0.9)
CONFIRM_ALPHA = 0.05


class CheckStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class CheckRow:
    check: str
    status: CheckStatus
    value: float
    error: float
    detail: str = ""


class VerificationSuite:
    """All checks for one claim in one market."""

    def __init__(self, model: MarketModel, payoff: Payoff, spec: QuadratureSpec,
                 settings: SolverSettings, n: int, seed: int, sigmas: float):
        self.model = model
        self.payoff = payoff
        self.spec = spec
        self.settings = settings
        self.n = n
        self.seed = seed
        self.sigmas = sigmas
        self.solver = QuantileSolver(model, payoff, spec, settings)
        self.rows: List[CheckRow] = []

    @property
    def failed(self) -> bool:
        return any(row.status is CheckStatus.FAIL for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "check": [row.check for row in self.rows],
            "status": [row.status.value for row in self.rows],
            "value": [row.value for row in self.rows],
            "error": [row.error for row in self.rows],
            "detail": [row.detail for row in self.rows],
        })

    def _add(self, check: str, ok: bool, value: float, error: float, detail: str = "") -> None:
        status = CheckStatus.PASS if ok else CheckStatus.FAIL
        self.rows.append(CheckRow(check, status, float(value), float(error), detail))
        if not ok:
            logger.warning(f"verification check failed: {check}",
                           extra={'custom_dimensions': {'value': value, 'error': error, 'detail': detail}})

    def _guarded(self, check: str, body: Callable[[], None]) -> None:
        try:
            body()
        except QuantileHedgingError as e:
            self.rows.append(CheckRow(check, CheckStatus.FAIL, math.nan, math.nan,
                                      f"{e.error_type}: {e.message}"))
            logger.warning(f"verification check raised: {check}", extra={'custom_dimensions': e.to_dict()})

    def _compare(self, check: str, quad_value: float, quad_error: float, estimate) -> None:
        ok = estimate.agrees_with(quad_value, self.sigmas, quad_error)
        self._add(check, ok, quad_value - estimate.mean, estimate.std_error + quad_error,
                  f"quadrature={quad_value:.12g} mc={estimate.mean:.12g} n={estimate.n}")

    # ------------------------------------------------------------------
    # Checks
    # ------------------------------------------------------------------

    def measure_identities(self) -> None:
        model = self.model
        p = model.params
        density = mc_expectation(model, model.density_at, self.n, self.seed, Measure.PHYSICAL)
        self._add("measure.density_mean", density.agrees_with(1.0, self.sigmas),
                  density.mean - 1.0, density.std_error, "E_P[Z~_T] = 1")
        for index, s0 in ((0, p.s0_1), (1, p.s0_2)):
            def discounted(w1, w2, index=index):
                return model.discount * model.terminal_assets(w1, w2, Measure.MARTINGALE)[index]

            estimate = mc_expectation(model, discounted, self.n, self.seed, Measure.MARTINGALE)
            self._add(f"measure.discounted_asset_{index + 1}", estimate.agrees_with(s0, self.sigmas),
                      estimate.mean - s0, estimate.std_error, "E~[e^{-rT} S_T] = S_0")

    def anchors(self) -> None:
        at_zero = psi1(self.model, self.payoff, 0.0, self.spec)
        self._add("anchor.psi1_at_zero", at_zero.value == 1.0, at_zero.value - 1.0, 0.0, "Psi1(0) = 1")
        price = psi2(self.model, self.payoff, 0.0, self.spec)
        self._compare("anchor.psi2_at_zero", price.value, price.est_error,
                      mc_price(self.model, self.payoff, self.n, self.seed))

    def monotonicity(self) -> None:
        grid = (np.logspace(-3, 3, MONOTONE_POINTS) / self.solver.price).tolist()
        curve = psi_curve(self.model, self.payoff, grid, self.spec)
        self._add("monotone.psi_curve", True, float(len(curve.c_grid)), 0.0,
                  f"{MONOTONE_POINTS}-point log grid")

    def limits(self) -> None:
        price = self.solver.price
        c = LARGE_LEVEL / price
        v1 = psi1(self.model, self.payoff, c, self.spec)
        v2 = psi2(self.model, self.payoff, c, self.spec)
        gap = v1.value - self.solver.prob_zero
        self._add("limit.psi1_to_prob_zero", abs(gap) < LIMIT_PSI1_TOL, gap, v1.est_error,
                  f"c={c:.6g} P(H=0)={self.solver.prob_zero:.12g}")
        self._add("limit.psi2_to_zero", v2.value < LIMIT_PSI2_REL_TOL * price, v2.value, v2.est_error,
                  f"c={c:.6g} bound={LIMIT_PSI2_REL_TOL * price:.3g}")

    def degenerate_closed_form(self) -> None:
        """Zero market price of risk with a digital claim: Psi1 is a step in cK."""
        if self.payoff.kind is not PayoffKind.DIGITAL or check_regularity(self.model, self.payoff).satisfied:
            return
        p = self.model.params
        strike = self.payoff.strike
        sd = math.sqrt(p.T * (p.sigma_1 ** 2 - 2.0 * p.rho * p.sigma_1 * p.sigma_2 + p.sigma_2 ** 2))
        below = std_normal_cdf(self.model.thresholds(strike).b / sd)
        worst = 0.0
        for ck in CLOSED_FORM_LEVELS:
            expected = 1.0 if ck <= 1.0 else below
            worst = max(worst, abs(psi1(self.model, self.payoff, ck / strike, self.spec).value - expected))
        self._add("degenerate.digital_closed_form", worst <= CLOSED_FORM_TOL, worst, CLOSED_FORM_TOL,
                  f"{len(CLOSED_FORM_LEVELS)} levels, P(S1 < S2)={below:.12g}")

    def _degenerate_row(self, check: str, error: DegenerateMeasure) -> None:
        self.rows.append(CheckRow(check, CheckStatus.DEGENERATE, math.nan, math.nan,
                                  f"{error.error_type}: {error.message}"))

    def phi_functions(self) -> None:
        solver = self.solver
        budgets = [f * solver.price for f in BUDGET_FRACTIONS]
        alphas = [a for a in ROUND_TRIP_ALPHAS if a < solver.prob_nonzero]
        try:
            maximal = [solver.phi1(x) for x in budgets]
            minimal = [solver.phi2(a) for a in alphas]
        except DegenerateMeasure as e:
            self._degenerate_row("phi.monotone", e)
            self._degenerate_row("phi1.budget_feasible", e)
            return
        slack = self.settings.risk_tol
        rises = all(b.value >= a.value - slack for a, b in zip(maximal, maximal[1:]))
        cost_slack = self.settings.budget_rel_tol * solver.price
        falls = all(b.value <= a.value + cost_slack for a, b in zip(minimal, minimal[1:]))
        self._add("phi.monotone", rises and falls, float(rises and falls), slack,
                  f"Phi1 over {len(budgets)} budgets, Phi2 over {len(alphas)} risk levels")
        excess = max(abs(r.modified_claim_price - x) for r, x in zip(maximal, budgets))
        self._add("phi1.budget_feasible", excess <= cost_slack, excess, cost_slack,
                  "price of H 1_A at c* against the budget")

    def success_probability(self) -> None:
        if not CONFIRM_ALPHA < self.solver.prob_nonzero:
            return
        try:
            result = self.solver.phi2(CONFIRM_ALPHA)
        except DegenerateMeasure as e:
            self._degenerate_row("phi2.success_probability", e)
            return
        estimate, _ = mc_psi(self.model, self.payoff, result.c_star, self.n, self.seed)
        target = 1.0 - CONFIRM_ALPHA
        ok = estimate.agrees_with(target, self.sigmas, self.settings.risk_tol)
        self._add("phi2.success_probability", ok, estimate.mean - target, estimate.std_error,
                  f"alpha={CONFIRM_ALPHA} c*={result.c_star:.12g} n={estimate.n}")

    def quadrature_vs_mc(self) -> None:
        for scale in CROSS_CHECK_SCALES:
            c = scale / self.solver.price
            est_1, est_2 = mc_psi(self.model, self.payoff, c, self.n, self.seed)
            v1 = psi1(self.model, self.payoff, c, self.spec)
            v2 = psi2(self.model, self.payoff, c, self.spec)
            self._compare(f"cross.psi1[c={c:.6g}]", v1.value, v1.est_error, est_1)
            self._compare(f"cross.psi2[c={c:.6g}]", v2.value, v2.est_error, est_2)

    def round_trip(self) -> None:
        alphas = [a for a in ROUND_TRIP_ALPHAS if a < self.solver.prob_nonzero]
        report = self.solver.duality_check(alphas)
        if report.degenerate:
            self.rows.append(CheckRow("duality.round_trip", CheckStatus.DEGENERATE, math.nan,
                                      report.tolerance, report.note or "DegenerateMeasure"))
            return
        worst = report.max_residual
        self._add("duality.round_trip", report.passed, worst, report.tolerance,
                  f"{len(report.points)} alphas, {len(report.violations)} violations")

    def neyman_pearson(self) -> None:
        agreeing = 0
        compared = 0
        min_gap = math.inf
        for i in range(NP_MARKETS):
            dm = random_discrete_market(NP_ATOMS, self.seed + i)
            ratio = np.sort(dm.likelihood_ratio)[::-1]
            # Budget spent exactly by the upper half of the ratio ordering.
            upper = dm.likelihood_ratio >= ratio[NP_ATOMS // 2 - 1]
            budget = float(dm.p2[upper].sum())
            confidence = float(dm.p1[upper].sum())
            for comparison in (np_bruteforce(dm, budget), np_bruteforce_min(dm, confidence)):
                if not comparison.exact_attainment:
                    continue
                compared += 1
                agreeing += comparison.agrees
            minimal = np_bruteforce_min(dm, confidence)
            if minimal.exact_attainment:
                min_gap = min(min_gap, min_cost_inequality_gap(dm, minimal.threshold_set,
                                                               minimal.threshold_level))
        ok = agreeing == compared and min_gap >= -1e-12
        self._add("neyman_pearson.threshold_optimal", ok, float(agreeing), 0.0,
                  f"{agreeing}/{compared} instances, min inequality gap {min_gap:.3g}")

    def spread_sets(self) -> None:
        rng = np.random.Generator(np.random.Philox(key=self.seed))
        cs = np.exp(rng.uniform(-8.0, 4.0, SPREAD_PAIRS)) / self.solver.price
        ys = rng.normal(0.0, math.sqrt(self.model.params.T), SPREAD_PAIRS)
        strike = self.payoff.strike
        disagreements = 0
        for c, y in zip(cs, ys):
            region = spread_upper_set(self.model, float(c), float(y), Measure.PHYSICAL, strike)
            ends = np.array([e for piece in region.intervals for e in piece if math.isfinite(e)])
            x = np.linspace(-10.0, 10.0, SPREAD_POINTS) * math.sqrt(self.model.params.T)
            if ends.size:
                far = np.min(np.abs(x[:, None] - ends[None, :]), axis=1) > ROOT_NEIGHBORHOOD * (1.0 + np.abs(x))
                x = x[far]
            direct = spread_inequality(self.model, strike, float(c), float(y), x, Measure.PHYSICAL)
            disagreements += int(np.sum(region.contains(x) != direct))
        self._add("spread.set_membership", disagreements == 0, float(disagreements), 0.0,
                  f"{SPREAD_PAIRS} (c, y) pairs x {SPREAD_POINTS} points")

    def run(self) -> "VerificationSuite":
        regularity = check_regularity(self.model, self.payoff)
        logger.info("verification started",
                    extra={'custom_dimensions': {'payoff': self.payoff.kind.value,
                                                 'regular': regularity.satisfied, 'n': self.n}})
        for name, body in (
            ("measure", self.measure_identities),
            ("anchor", self.anchors),
            ("monotone", self.monotonicity),
            ("limit", self.limits),
            ("degenerate", self.degenerate_closed_form),
            ("phi", self.phi_functions),
            ("phi2", self.success_probability),
            ("cross", self.quadrature_vs_mc),
            ("duality", self.round_trip),
            ("neyman_pearson", self.neyman_pearson),
            ("spread", self.spread_sets),
        ):
            self._guarded(name, body)
        return self
