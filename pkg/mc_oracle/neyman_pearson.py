# ============================================================================
# MODULE CONTEXT - NEYMAN-PEARSON BRUTE FORCE
# ============================================================================
# STATUS: Oracle - exhaustive check of likelihood-ratio optimality
# PURPOSE: Enumerate every subset of a small discrete market and compare the
#          best set with the likelihood-ratio threshold set
# EXPORTS: random_discrete_market, np_bruteforce, np_bruteforce_min,
#          min_cost_inequality_gap
# DEPENDENCIES: numpy
# ============================================================================

"""
Neyman-Pearson verifier on finite probability spaces.

Two static problems are checked against all 2^n subsets:

    max  P1(A)  subject to  P2(A) <= budget       threshold set {dP1/dP2 >= c}
    min  P2(B)  subject to  P1(B) >= confidence   threshold set {dP2/dP1 <= c}

Both threshold families are nested, so the candidate sets are the n + 1
upper (or lower) sets of the sorted ratio. A threshold set is only
claimed optimal when it meets its constraint with equality; otherwise the
comparison is reported with ``exact_attainment = False``.
"""

import math
from functools import lru_cache
from typing import FrozenSet, Tuple

import numpy as np

from exceptions import InvalidParameter
from util_logger import ComponentType, LoggerFactory
from .models import DiscreteMarket, NPComparison

logger = LoggerFactory.create_logger(ComponentType.ORACLE, "neyman_pearson")

# Equality tolerance for constraint attainment and feasibility.
ATTAIN_TOL = 1e-12


@lru_cache(maxsize=4)
def _membership(n_atoms: int) -> np.ndarray:
    """(2^n, n) boolean table; row m holds the bits of m."""
    masks = np.arange(1 << n_atoms, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n_atoms)) & 1).astype(bool)


def _as_set(row: np.ndarray) -> FrozenSet[int]:
    return frozenset(int(i) for i in np.flatnonzero(row))


def random_discrete_market(n_atoms: int, seed: int) -> DiscreteMarket:
    """Two independent Dirichlet(1, ..., 1) measures on n_atoms points."""
    if n_atoms < 1:
        raise InvalidParameter(f"need at least one atom, got {n_atoms}")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    p1 = rng.dirichlet(np.ones(n_atoms))
    p2 = rng.dirichlet(np.ones(n_atoms))
    # Renormalise after the positivity floor.
    p1 = np.maximum(p1, 1e-12)
    p2 = np.maximum(p2, 1e-12)
    return DiscreteMarket(p1 / p1.sum(), p2 / p2.sum())


def _nested_sets(ratio: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Upper sets {ratio >= c} for c running down the distinct ratios.

    Returns (levels, members): levels[0] = inf gives the empty set and
    each following level adds every atom tied at that ratio.
    """
    distinct = np.unique(ratio)[::-1]
    levels = np.concatenate(([math.inf], distinct))
    members = ratio[None, :] >= levels[:, None]
    return levels, members


def _unit_level(name: str, value: float) -> float:
    """Check value lies in [0, 1] up to ATTAIN_TOL and clamp it there."""
    if not -ATTAIN_TOL <= value <= 1.0 + ATTAIN_TOL:
        raise InvalidParameter(f"{name} must lie in [0, 1], got {value}")
    return min(max(float(value), 0.0), 1.0)


def np_bruteforce(dm: DiscreteMarket, budget: float) -> NPComparison:
    """
    Maximise P1 over subsets with P2 <= budget and compare with {dP1/dP2 >= c}.

    The threshold level is the c whose set spends the budget exactly, when
    such a c exists; otherwise the largest affordable threshold set is
    reported without an optimality claim.
    """
    budget = _unit_level("budget", budget)
    table = _membership(dm.n_atoms)
    prob = table @ dm.p1
    cost = table @ dm.p2
    feasible = cost <= budget + ATTAIN_TOL
    best_row = int(np.argmax(np.where(feasible, prob, -np.inf)))

    levels, members = _nested_sets(dm.likelihood_ratio)
    set_cost = members @ dm.p2
    set_prob = members @ dm.p1
    exact = np.flatnonzero(np.abs(set_cost - budget) <= ATTAIN_TOL)
    if exact.size:
        pick, attained = int(exact[-1]), True
    else:
        pick, attained = int(np.flatnonzero(set_cost <= budget + ATTAIN_TOL)[-1]), False

    return NPComparison(
        best_set=_as_set(table[best_row]),
        best_objective=float(prob[best_row]),
        threshold_set=_as_set(members[pick]),
        threshold_objective=float(set_prob[pick]),
        threshold_level=float(levels[pick]),
        exact_attainment=attained,
        constraint_value=float(set_cost[pick]),
        note=None if attained else "no threshold spends the budget exactly",
    )


def np_bruteforce_min(dm: DiscreteMarket, confidence: float) -> NPComparison:
    """
    Minimise P2 over subsets with P1 >= confidence and compare with {dP2/dP1 <= c}.
    """
    confidence = _unit_level("confidence", confidence)
    table = _membership(dm.n_atoms)
    prob = table @ dm.p1
    cost = table @ dm.p2
    feasible = prob >= confidence - ATTAIN_TOL
    best_row = int(np.argmin(np.where(feasible, cost, np.inf)))

    # {dP2/dP1 <= c} = {dP1/dP2 >= 1/c}: the same nested family, growing.
    levels, members = _nested_sets(dm.likelihood_ratio)
    set_cost = members @ dm.p2
    set_prob = members @ dm.p1
    exact = np.flatnonzero(np.abs(set_prob - confidence) <= ATTAIN_TOL)
    if exact.size:
        pick, attained = int(exact[0]), True
    else:
        pick, attained = int(np.flatnonzero(set_prob >= confidence - ATTAIN_TOL)[0]), False
    level = 0.0 if math.isinf(levels[pick]) else 1.0 / float(levels[pick])

    return NPComparison(
        best_set=_as_set(table[best_row]),
        best_objective=float(cost[best_row]),
        threshold_set=_as_set(members[pick]),
        threshold_objective=float(set_cost[pick]),
        threshold_level=level,
        exact_attainment=attained,
        constraint_value=float(set_prob[pick]),
        note=None if attained else "no threshold meets the confidence exactly",
    )


def min_cost_inequality_gap(dm: DiscreteMarket, threshold_set: FrozenSet[int], c: float) -> float:
    """
    min over feasible B of P2(B) - P2(B~) - c (P1(B) - P1(B~)).

    B~ is ``threshold_set`` = {dP2/dP1 <= c} and feasible means
    P1(B) >= P1(B~). A nonnegative result confirms optimality of B~.
    """
    table = _membership(dm.n_atoms)
    prob = table @ dm.p1
    cost = table @ dm.p2
    chosen = np.zeros(dm.n_atoms, dtype=bool)
    chosen[list(threshold_set)] = True
    base_prob = float(dm.p1[chosen].sum())
    base_cost = float(dm.p2[chosen].sum())
    feasible = prob >= base_prob - ATTAIN_TOL
    gaps = (cost - base_cost) - c * (prob - base_prob)
    gap = float(np.min(gaps[feasible]))
    logger.debug("min-cost inequality gap", extra={'custom_dimensions': {'gap': gap, 'c': c}})
    return gap
