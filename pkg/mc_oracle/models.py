# ============================================================================
# MODULE CONTEXT - MONTE CARLO ORACLE MODELS
# ============================================================================
# STATUS: Foundation - estimator and discrete-market records
# PURPOSE: Sample-mean estimates with standard errors, mergeable moment
#          accumulators, discrete two-measure markets and NP comparisons
# EXPORTS: McEstimate, MomentAccumulator, DiscreteMarket, NPComparison
# DEPENDENCIES: numpy
# ============================================================================

"""
Monte Carlo oracle records.

``MomentAccumulator`` keeps (n, mean, M2) and merges with the pairwise
update of Chan, Golub and LeVeque, so partial sums computed on disjoint
block ranges combine to the same estimate in any order.
"""

import math
from dataclasses import dataclass, field
from typing import FrozenSet, Optional

import numpy as np

from exceptions import InvalidParameter

# Weight sums must equal 1 to this accuracy.
WEIGHT_SUM_TOL = 1e-9
MAX_ATOMS = 20


@dataclass(frozen=True)
class McEstimate:
    """
    Sample mean with std_error = sample_sd / sqrt(n), reproducible from (seed, n).

    ``bound`` is set when every sample lies in [0, bound]: indicators use
    1, a digital payoff its discounted strike. The sample SE is then
    floored by the binomial SE at the reference value, which stays positive
    when every draw lands on the same end.
    """
    mean: float
    std_error: float
    n: int
    seed: int
    bound: Optional[float] = None

    def error_floor(self, reference: float) -> float:
        if self.bound is None or self.n <= 0 or not self.bound > 0.0:
            return 0.0
        q = min(max(reference / self.bound, 0.0), 1.0)
        return self.bound * math.sqrt(q * (1.0 - q) / self.n)

    def band(self, reference: float, sigmas: float, extra_error: float = 0.0) -> float:
        """Allowed |mean - reference|."""
        return sigmas * max(self.std_error, self.error_floor(reference)) + extra_error

    def deviation(self, value: float, extra_error: float = 0.0) -> float:
        """|mean - value| in units of the (floored) standard error plus ``extra_error``."""
        gap = abs(self.mean - value)
        scale = max(self.std_error, self.error_floor(value)) + extra_error
        if scale == 0.0:
            return 0.0 if gap == 0.0 else math.inf
        return gap / scale

    def agrees_with(self, value: float, sigmas: float, extra_error: float = 0.0) -> bool:
        return abs(self.mean - value) <= self.band(value, sigmas, extra_error)


@dataclass
class MomentAccumulator:
    """Running count, mean and sum of squared deviations."""
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other.n == 0:
            return MomentAccumulator(self.n, self.mean, self.m2)
        if self.n == 0:
            return MomentAccumulator(other.n, other.mean, other.m2)
        n = self.n + other.n
        delta = other.mean - self.mean
        return MomentAccumulator(
            n=n,
            mean=self.mean + delta * other.n / n,
            m2=self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        )

    def update(self, values: np.ndarray) -> "MomentAccumulator":
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return self.merge(MomentAccumulator())
        batch_mean = float(values.mean())
        batch = MomentAccumulator(
            n=int(values.size),
            mean=batch_mean,
            m2=float(np.sum((values - batch_mean) ** 2)),
        )
        return self.merge(batch)

    @property
    def sample_var(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    def to_estimate(self, seed: int, bound: Optional[float] = None) -> McEstimate:
        std_error = math.sqrt(self.sample_var / self.n) if self.n > 0 else math.inf
        return McEstimate(mean=self.mean, std_error=std_error, n=self.n, seed=seed, bound=bound)


@dataclass(frozen=True)
class DiscreteMarket:
    """
    Finite probability space carrying two strictly positive measures.

    ``p1`` plays the physical role (probability to maximize) and ``p2`` the
    pricing role (cost to keep under a budget).
    """
    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float).ravel()
        p2 = np.asarray(self.p2, dtype=float).ravel()
        if p1.shape != p2.shape or p1.size == 0:
            raise InvalidParameter("both measures need the same, nonzero number of atoms")
        if p1.size > MAX_ATOMS:
            raise InvalidParameter(f"at most {MAX_ATOMS} atoms are supported, got {p1.size}")
        if np.any(p1 <= 0.0) or np.any(p2 <= 0.0):
            raise InvalidParameter("atom weights must be strictly positive")
        for name, weights in (("p1", p1), ("p2", p2)):
            if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise InvalidParameter(f"{name} weights must sum to 1, got {weights.sum()!r}")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @classmethod
    def from_atoms(cls, atoms) -> "DiscreteMarket":
        """Build from (p_weight, p_star_weight) pairs."""
        pairs = np.asarray(atoms, dtype=float).reshape(-1, 2)
        return cls(pairs[:, 0], pairs[:, 1])

    @property
    def n_atoms(self) -> int:
        return int(self.p1.size)

    @property
    def likelihood_ratio(self) -> np.ndarray:
        """dP1/dP2 atom by atom."""
        return self.p1 / self.p2


@dataclass(frozen=True)
class NPComparison:
    """
    Exhaustive optimum against the likelihood-ratio threshold set.

    Sets are frozensets of atom indices. ``exact_attainment`` says whether
    the threshold set meets the constraint with equality; only then is it
    claimed to be optimal.
    """
    best_set: FrozenSet[int]
    best_objective: float
    threshold_set: FrozenSet[int]
    threshold_objective: float
    threshold_level: float
    exact_attainment: bool
    constraint_value: float = field(default=math.nan)
    note: Optional[str] = None

    @property
    def agrees(self) -> bool:
        """Threshold objective equals the exhaustive optimum up to rounding."""
        return abs(self.best_objective - self.threshold_objective) <= 1e-12
