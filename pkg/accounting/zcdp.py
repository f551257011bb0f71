"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: zcdp.py                                                         |
|     Authors: dp-decode contributors                                          |
| Description: Zero-concentrated DP accounting for clipped-logit exponential   |
|              mechanism decoding: sensitivities, per-token and composed rho,  |
|              zCDP <-> (epsilon, delta) conversion and clip norm calibration  |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
import math
from typing import Sequence

from scipy.optimize import bisect, minimize_scalar

from accounting.notions import (
    DCLIP,
    AdjacencyNotion,
    ClippingStrategy,
    ConversionMethod,
    parse_method,
    require_accountable,
)
from common.exceptions import AccountingError


log = logging.getLogger(__name__)

# Search interval of the Renyi order in the tight conversion.
ALPHA_FLOOR = 1.0 + 1e-9
ALPHA_CEILING = 1e30
GOLDEN_TOLERANCE = 1e-9
BISECTION_RTOL = 1e-9
BISECTION_XTOL = 1e-15


def _check_clip_inputs(C: float, B: int) -> None:
    if C < 0 or not math.isfinite(C):
        raise ValueError(f"clip norm C must be a finite non-negative number, got {C}")
    if int(B) != B or B < 1:
        raise ValueError(f"batch size B must be a positive integer, got {B}")


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def sensitivity_factor(
    strategy: ClippingStrategy, adjacency: AdjacencyNotion
) -> int:
    """Multiple of C/B that bounds the change of the aggregated logits.

    |                        | replace_by_null | zero_out |
    |------------------------|-----------------|----------|
    | dclip                  | 1               | 2        |
    | naive_clip             | 2               | 1        |
    | naive_clip + advantage | 1               | 1        |

    Args:
        strategy (ClippingStrategy): the clipping strategy
        adjacency (AdjacencyNotion): the adjacency notion

    Returns:
        int: 1 or 2
    """
    adjacency = require_accountable(adjacency)
    if strategy.is_dclip:
        return 1 if adjacency is AdjacencyNotion.REPLACE_BY_NULL else 2
    if adjacency is AdjacencyNotion.ZERO_OUT or strategy.sensitivity_advantage:
        return 1
    return 2


def sensitivity(
    strategy: ClippingStrategy, adjacency: AdjacencyNotion, C: float, B: int
) -> float:
    """l-infinity sensitivity of the clipped-and-averaged logits.

    Args:
        strategy (ClippingStrategy): the clipping strategy
        adjacency (AdjacencyNotion): the adjacency notion
        C (float):                   clip norm
        B (int):                     number of references in the batch

    Returns:
        float: the sensitivity
    """
    _check_clip_inputs(C, B)
    return sensitivity_factor(strategy, adjacency) * C / B


def rho_per_token(
    C: float,
    B: int,
    tau: float,
    strategy: ClippingStrategy = DCLIP,
    adjacency: AdjacencyNotion = AdjacencyNotion.REPLACE_BY_NULL,
) -> float:
    """zCDP cost of sampling one token: (sens / tau)^2 / 2."""
    if not tau > 0:
        raise ValueError(f"temperature tau must be positive, got {tau}")
    return (sensitivity(strategy, adjacency, C, B) / tau) ** 2 / 2


def compose_sequence(rho_tok: float, T: int) -> float:
    """zCDP of a generation with token budget T, however early it stops.

    Args:
        rho_tok (float): per-token rho
        T (int):         maximum number of tokens

    Returns:
        float: T * rho_tok
    """
    if int(T) != T or T < 1:
        raise ValueError(f"token budget T must be a positive integer, got {T}")
    return T * rho_tok


def compose_parallel(batch_rhos: Sequence[float]) -> float:
    """zCDP of generations run on disjoint reference batches: the maximum.

    The caller guarantees the batches are disjoint.
    """
    if not batch_rhos:
        raise ValueError("no batch rho values to compose")
    return max(batch_rhos)


def _tight_objective(alpha: float, rho: float, log_inv_delta: float) -> float:
    return (
        alpha * rho
        + (log_inv_delta - math.log(alpha)) / (alpha - 1)
        + math.log1p(-1 / alpha)
    )


def _loose_epsilon(rho: float, log_inv_delta: float) -> float:
    return rho + 2 * math.sqrt(rho * log_inv_delta)


def _tight_epsilon(rho: float, log_inv_delta: float) -> float:
    """Minimize the conversion objective over the Renyi order alpha > 1.

    The objective is unimodal in alpha and blows up as alpha -> 1+, so the
    upper end of the bracket is grown geometrically until the objective
    increases, then golden-section search finishes the job.
    """

    def objective(alpha: float) -> float:
        return _tight_objective(alpha, rho, log_inv_delta)

    low, mid, high = ALPHA_FLOOR, 2.0, 4.0
    f_low, f_mid, f_high = objective(low), objective(mid), objective(high)
    while f_high <= f_mid:
        if f_mid < f_low:
            low, f_low = mid, f_mid
        mid, f_mid = high, f_high
        high *= 2
        if high > ALPHA_CEILING:
            raise AccountingError(
                f"no minimizing Renyi order below {ALPHA_CEILING:g} for rho={rho}"
            )
        f_high = objective(high)
    if not f_mid < f_low:
        raise AccountingError(f"could not bracket the Renyi order for rho={rho}")

    result = minimize_scalar(
        objective, bracket=(low, mid, high), method="golden", tol=GOLDEN_TOLERANCE
    )
    log.debug("Tight conversion: rho=%g alpha*=%g eps=%g", rho, result.x, result.fun)
    return float(result.fun)


def zcdp_to_eps(
    rho: float, delta: float, method: ConversionMethod = ConversionMethod.TIGHT
) -> float:
    """Smallest epsilon such that rho-zCDP implies (epsilon, delta)-DP.

    tight:  inf over alpha > 1 of
            alpha*rho + log(1/(alpha*delta))/(alpha-1) + log(1 - 1/alpha)
    loose:  rho + 2*sqrt(rho*log(1/delta))

    Args:
        rho (float):                 zCDP parameter (>= 0)
        delta (float):               target delta in (0, 1)
        method (ConversionMethod):   "tight" or "loose"

    Returns:
        float: epsilon; tight never exceeds loose
    """
    method = parse_method(method)
    if rho < 0 or not math.isfinite(rho):
        raise ValueError(f"rho must be a finite non-negative number, got {rho}")
    _check_delta(delta)
    if rho == 0:
        return 0.0
    log_inv_delta = math.log(1 / delta)
    loose = _loose_epsilon(rho, log_inv_delta)
    if method is ConversionMethod.LOOSE:
        return loose
    return max(0.0, min(_tight_epsilon(rho, log_inv_delta), loose))


def eps_to_zcdp(
    epsilon: float, delta: float, method: ConversionMethod = ConversionMethod.TIGHT
) -> float:
    """Largest rho whose (epsilon, delta) conversion stays within epsilon.

    epsilon is increasing in rho, so the inverse is found by bisection.

    Args:
        epsilon (float):             target epsilon (> 0)
        delta (float):               target delta in (0, 1)
        method (ConversionMethod):   "tight" or "loose"

    Returns:
        float: rho
    """
    method = parse_method(method)
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be a finite positive number, got {epsilon}")
    _check_delta(delta)

    def gap(rho: float) -> float:
        return zcdp_to_eps(rho, delta, method) - epsilon

    high = max(epsilon, 1.0)
    while gap(high) <= 0:
        high *= 2
    rho = bisect(gap, 0.0, high, xtol=BISECTION_XTOL, rtol=BISECTION_RTOL)
    log.debug("eps=%g delta=%g (%s) -> rho=%g", epsilon, delta, method.value, rho)
    return float(rho)


def calibrate_clip_norm(
    rho_seq: float,
    B: int,
    tau: float,
    T: int,
    strategy: ClippingStrategy = DCLIP,
    adjacency: AdjacencyNotion = AdjacencyNotion.REPLACE_BY_NULL,
) -> float:
    """Clip norm whose T-token generation costs exactly rho_seq.

    For dclip under replace-by-null this is C = B * tau * sqrt(2 * rho_seq / T);
    strategies with sensitivity 2C/B get half of that.

    Args:
        rho_seq (float):             sequence-level zCDP budget
        B (int):                     references per batch
        tau (float):                 sampling temperature
        T (int):                     token budget
        strategy (ClippingStrategy): the clipping strategy
        adjacency (AdjacencyNotion): the adjacency notion

    Returns:
        float: the clip norm C
    """
    if rho_seq < 0 or not math.isfinite(rho_seq):
        raise ValueError(f"rho_seq must be a finite non-negative number, got {rho_seq}")
    if not tau > 0:
        raise ValueError(f"temperature tau must be positive, got {tau}")
    _check_clip_inputs(0.0, B)
    compose_sequence(0.0, T)
    factor = sensitivity_factor(strategy, adjacency)
    return B * tau * math.sqrt(2 * rho_seq / T) / factor


def temperature_for_rho(rho_tok: float, sens: float) -> float:
    """Temperature of the exponential mechanism with per-token cost rho_tok.

    Sampling from softmax(scores / tau) with tau = sens / sqrt(2 * rho_tok) is
    the exponential mechanism with weight sqrt(2 * rho_tok) / sens.
    """
    if not rho_tok > 0:
        raise ValueError(f"rho_tok must be positive, got {rho_tok}")
    if sens < 0:
        raise ValueError(f"sensitivity must be non-negative, got {sens}")
    return sens / math.sqrt(2 * rho_tok)


def calibrate_temperature(
    rho_seq: float,
    B: int,
    C: float,
    T: int,
    strategy: ClippingStrategy = DCLIP,
    adjacency: AdjacencyNotion = AdjacencyNotion.REPLACE_BY_NULL,
) -> float:
    """Temperature whose T-token generation costs exactly rho_seq at clip norm C."""
    if not rho_seq > 0:
        raise ValueError(f"rho_seq must be positive, got {rho_seq}")
    rho_tok = rho_seq / compose_sequence(1.0, T)
    return temperature_for_rho(rho_tok, sensitivity(strategy, adjacency, C, B))
