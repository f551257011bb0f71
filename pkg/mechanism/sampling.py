"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: sampling.py                                                     |
|     Authors: dp-decode contributors                                          |
| Description: Exponential-mechanism token selection over the expanded Top-k+  |
|              vocabulary                                                      |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
import math
from typing import Union

import numpy as np

from mechanism.clipping import AggregatedLogits
from mechanism.topk import TopKPlusSet


log = logging.getLogger(__name__)

RandomSource = Union[None, int, np.random.Generator]


def _restricted_softmax(scores: np.ndarray, members: np.ndarray) -> np.ndarray:
    z = scores[members]
    z = z - z.max()
    weights = np.exp(z)
    probabilities = np.zeros(scores.size, dtype=np.float64)
    probabilities[members] = weights / weights.sum()
    return probabilities


def _members(allowed: Union[TopKPlusSet, np.ndarray]) -> np.ndarray:
    members = allowed.members if isinstance(allowed, TopKPlusSet) else allowed
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise ValueError("cannot sample from an empty token set")
    return members


def token_distribution(
    agg: Union[AggregatedLogits, np.ndarray],
    allowed: Union[TopKPlusSet, np.ndarray],
    tau: float,
) -> np.ndarray:
    """Law of the next token: softmax(agg[V_k+] / tau), zero outside V_k+.

    Args:
        agg (AggregatedLogits):  aggregated logits (or a plain vector)
        allowed (TopKPlusSet):   the expanded top-k set (or member indices)
        tau (float):             sampling temperature

    Returns:
        np.ndarray: probabilities over the whole vocabulary
    """
    if not tau > 0:
        raise ValueError(f"temperature tau must be positive, got {tau}")
    values = agg.values if isinstance(agg, AggregatedLogits) else agg
    values = np.asarray(values, dtype=np.float64)
    return _restricted_softmax(values / tau, _members(allowed))


def sample_token(
    agg: Union[AggregatedLogits, np.ndarray],
    allowed: Union[TopKPlusSet, np.ndarray],
    tau: float,
    rng: RandomSource = None,
) -> int:
    """Draw one token from token_distribution(agg, allowed, tau).

    rng may be a seed or a numpy Generator; the same seed gives the same token.
    """
    rng = np.random.default_rng(rng)
    members = _members(allowed)
    probabilities = token_distribution(agg, members, tau)
    token = int(rng.choice(members, p=probabilities[members]))
    log.debug("Sampled token %d out of %d candidates", token, members.size)
    return token


def exponential_mechanism_distribution(
    scores: np.ndarray,
    members: Union[TopKPlusSet, np.ndarray],
    rho: float,
    sens: float,
) -> np.ndarray:
    """rho-zCDP exponential mechanism: P(y) proportional to
    exp(sqrt(2 rho) * scores(y) / sens) over the members.

    Equal to token_distribution(scores, members, tau) with
    tau = sens / sqrt(2 rho).
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not sens > 0:
        raise ValueError(f"sensitivity must be positive, got {sens}")
    scores = np.asarray(scores, dtype=np.float64)
    return _restricted_softmax(scores * (math.sqrt(2 * rho) / sens), _members(members))
