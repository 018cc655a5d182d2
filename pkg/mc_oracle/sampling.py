# ============================================================================
# MODULE CONTEXT - MONTE CARLO SAMPLING
# ============================================================================
# STATUS: Oracle - independent estimators for the quadrature engine
# PURPOSE: Correlated terminal Brownian draws and sample-mean estimators of
#          prices, zero-payoff probabilities and Psi1 / Psi2
# EXPORTS: sample_terminal, partial_moments, mc_expectation, mc_price,
#          mc_prob_zero, mc_psi
# DEPENDENCIES: numpy, market, payoffs, psi_engine
# ============================================================================

"""
Monte Carlo sampling.

Draws are organised in fixed-size blocks. Block ``b`` of measure ``m``
under seed ``s`` comes from a Philox generator keyed by ``s`` with counter
(0, 0, stream(m), b), so any block can be regenerated on its own and block
ranges can be summed by separate workers and merged in any order.

Every estimator evaluates the unconditional success predicate on raw
draws; nothing here shares code with the conditional quadrature formulas.
"""

import math
from typing import Callable, Iterator, Optional, Tuple

import numpy as np

from config import get_app_config
from exceptions import InvalidParameter
from market import MarketModel, Measure
from payoffs import Payoff, PayoffKind, payoff_value
from psi_engine import success_set
from .models import McEstimate, MomentAccumulator

_STREAMS = {Measure.PHYSICAL: 0, Measure.MARTINGALE: 1}

Functional = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _generator(seed: int, measure: Measure, block: int) -> np.random.Generator:
    bit_generator = np.random.Philox(key=int(seed), counter=[0, 0, _STREAMS[Measure(measure)], block])
    return np.random.Generator(bit_generator)


def _check_count(n: int) -> int:
    n = int(n)
    if n < 1:
        raise InvalidParameter(f"sample count must be at least 1, got {n}")
    return n


def _blocks(model: MarketModel, n: int, seed: int, measure: Measure,
            chunk_size: int, block_range: Optional[range] = None
            ) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    factor = np.linalg.cholesky(model.covariance)
    n_blocks = -(-n // chunk_size)
    for block in (block_range if block_range is not None else range(n_blocks)):
        if not 0 <= block < n_blocks:
            continue
        size = min(chunk_size, n - block * chunk_size)
        z = _generator(seed, measure, block).standard_normal((size, 2))
        w = z @ factor.T
        yield w[:, 0], w[:, 1]


def sample_terminal(model: MarketModel, n: int, seed: int,
                    measure: Measure = Measure.PHYSICAL,
                    chunk_size: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    n draws of the terminal Brownian vector, N(0, T Q).

    Under MARTINGALE the coordinates are W~ draws.
    """
    n = _check_count(n)
    chunk_size = chunk_size or get_app_config().mc_chunk_size
    parts = list(_blocks(model, n, seed, measure, chunk_size))
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]))


def partial_moments(model: MarketModel, g: Functional, n: int, seed: int,
                    measure: Measure = Measure.PHYSICAL,
                    block_range: Optional[range] = None,
                    chunk_size: Optional[int] = None) -> MomentAccumulator:
    """Moments of g over the blocks in ``block_range`` (all blocks when omitted)."""
    n = _check_count(n)
    chunk_size = chunk_size or get_app_config().mc_chunk_size
    acc = MomentAccumulator()
    for w1, w2 in _blocks(model, n, seed, measure, chunk_size, block_range):
        acc = acc.update(g(w1, w2))
    return acc


def mc_expectation(model: MarketModel, g: Functional, n: Optional[int] = None,
                   seed: Optional[int] = None, measure: Measure = Measure.PHYSICAL,
                   chunk_size: Optional[int] = None,
                   bound: Optional[float] = None) -> McEstimate:
    """
    E[g(W_T)] under ``measure``; g receives the coordinates of that measure.

    Pass ``bound`` when g takes values in [0, bound].
    """
    config = get_app_config()
    n = config.mc_paths if n is None else n
    seed = config.mc_seed if seed is None else seed
    return partial_moments(model, g, n, seed, measure, chunk_size=chunk_size).to_estimate(seed, bound)


def _payoff_bound(model: MarketModel, payoff: Payoff) -> Optional[float]:
    """Largest discounted payoff, when the claim is bounded."""
    if payoff.kind is PayoffKind.DIGITAL:
        return model.discount * payoff.strike
    return None


def mc_price(model: MarketModel, payoff: Payoff, n: Optional[int] = None,
             seed: Optional[int] = None) -> McEstimate:
    """p(H) as the martingale-measure mean of e^{-rT} H."""
    discount = model.discount

    def discounted(w1, w2):
        s1, s2 = model.terminal_assets(w1, w2, Measure.MARTINGALE)
        return discount * payoff_value(payoff, s1, s2)

    return mc_expectation(model, discounted, n, seed, Measure.MARTINGALE,
                          bound=_payoff_bound(model, payoff))


def mc_prob_zero(model: MarketModel, payoff: Payoff, n: Optional[int] = None,
                 seed: Optional[int] = None) -> McEstimate:
    """P(H = 0) as a physical-measure frequency."""
    def is_zero(w1, w2):
        s1, s2 = model.terminal_assets(w1, w2, Measure.PHYSICAL)
        return (payoff_value(payoff, s1, s2) <= 0.0).astype(float)

    return mc_expectation(model, is_zero, n, seed, Measure.PHYSICAL, bound=1.0)


def mc_psi(model: MarketModel, payoff: Payoff, c: float, n: Optional[int] = None,
           seed: Optional[int] = None) -> Tuple[McEstimate, McEstimate]:
    """
    (Psi1, Psi2) estimates at level c.

    Psi1 is the physical frequency of A_c. Psi2 draws W~, maps back to
    W = W~ - theta T and averages e^{-rT} H 1_{A_c} with the same physical
    predicate.
    """
    if math.isnan(c) or c < 0.0:
        raise InvalidParameter(f"level c must be nonnegative, got {c}")
    success = success_set(model, payoff, c)
    discount = model.discount

    def in_set(w1, w2):
        return np.asarray(success.contains(w1, w2), dtype=float)

    def knocked_out(w1_tilde, w2_tilde):
        w1, w2 = model.martingale_shift(w1_tilde, w2_tilde, to=Measure.PHYSICAL)
        s1, s2 = model.terminal_assets(w1, w2, Measure.PHYSICAL)
        member = np.asarray(success.contains(w1, w2), dtype=float)
        return discount * payoff_value(payoff, s1, s2) * member

    return (mc_expectation(model, in_set, n, seed, Measure.PHYSICAL, bound=1.0),
            mc_expectation(model, knocked_out, n, seed, Measure.MARTINGALE,
                           bound=_payoff_bound(model, payoff)))
