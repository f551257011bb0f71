"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: clipping.py                                                     |
|     Authors: dp-decode contributors                                          |
| Description: Coordinate clipping, DClip, the naive-clip baseline and the     |
|              aggregation of private logits                                   |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from accounting.notions import DCLIP, ClippingStrategy


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClipParams:
    """Clip norm and strategy.

    C = 0 is accepted: every private deviation is clipped away and decoding
    falls back to the public logits. recenter subtracts each private vector's
    mean before naive clipping; it is an extension point of the naive-clip
    baseline and is off by default.
    """

    C: float
    strategy: ClippingStrategy = DCLIP
    recenter: bool = False

    def __post_init__(self) -> None:
        if not np.isfinite(self.C) or self.C < 0:
            raise ValueError(
                f"clip norm C must be finite and non-negative, got {self.C}"
            )
        if self.recenter and self.strategy.is_dclip:
            raise ValueError("recentering only applies to naive_clip")


@dataclass(frozen=True)
class AggregatedLogits:
    values: np.ndarray
    contributing_B: int
    strategy: ClippingStrategy


def _same_length(*vectors: np.ndarray) -> None:
    lengths = {vector.shape for vector in vectors}
    if len(lengths) != 1:
        raise ValueError(f"logit vectors of different shapes: {sorted(lengths)}")


def clip(v: np.ndarray, C: float) -> np.ndarray:
    """Project every coordinate onto [-C, C]."""
    if C < 0:
        raise ValueError(f"clip norm C must be non-negative, got {C}")
    return np.clip(np.asarray(v, dtype=np.float64), -C, C)


def dclip(phi: np.ndarray, phi_pub: np.ndarray, C: float) -> np.ndarray:
    """Clip only the deviation of private logits from the public logits.

    Args:
        phi (np.ndarray):      private logits
        phi_pub (np.ndarray):  public logits
        C (float):             clip norm

    Returns:
        np.ndarray: phi_pub + clip(phi - phi_pub, C)
    """
    phi = np.asarray(phi, dtype=np.float64)
    phi_pub = np.asarray(phi_pub, dtype=np.float64)
    _same_length(phi, phi_pub)
    return phi_pub + clip(phi - phi_pub, C)


def aggregate(
    phis: Sequence[np.ndarray], phi_pub: np.ndarray, params: ClipParams
) -> AggregatedLogits:
    """Average the clipped private logits of one batch.

    dclip:       phi_pub + (1/B) * sum_i clip(phi_i - phi_pub, C)
    naive_clip:  (1/B) * sum_i clip(phi_i, C), no use of phi_pub

    Args:
        phis (Sequence[np.ndarray]):  the B private logit vectors
        phi_pub (np.ndarray):         the public logit vector
        params (ClipParams):          clip norm and strategy

    Returns:
        AggregatedLogits: the aggregated vector
    """
    if len(phis) == 0:
        raise ValueError("cannot aggregate an empty list of logit vectors")
    phi_pub = np.asarray(phi_pub, dtype=np.float64)
    stacked = np.asarray([np.asarray(phi, dtype=np.float64) for phi in phis])
    if stacked.ndim != 2 or stacked.shape[1:] != phi_pub.shape:
        raise ValueError(
            f"private logits of shape {stacked.shape[1:]} do not match public "
            + f"logits of shape {phi_pub.shape}"
        )

    if params.strategy.is_dclip:
        values = phi_pub + clip(stacked - phi_pub, params.C).mean(axis=0)
    else:
        if params.recenter:
            stacked = stacked - stacked.mean(axis=1, keepdims=True)
        values = clip(stacked, params.C).mean(axis=0)
    return AggregatedLogits(values, len(phis), params.strategy)


def clip_retention(
    phi: np.ndarray, phi_pub: np.ndarray, C: float, strategy: ClippingStrategy = DCLIP
) -> float:
    """Fraction of coordinates that the clipping map leaves unchanged.

    Args:
        phi (np.ndarray):              private logits
        phi_pub (np.ndarray):          public logits (used by dclip only)
        C (float):                     clip norm
        strategy (ClippingStrategy):   dclip or naive_clip

    Returns:
        float: share of coordinates y with clipped(y) == phi(y)
    """
    phi = np.asarray(phi, dtype=np.float64)
    if strategy.is_dclip:
        phi_pub = np.asarray(phi_pub, dtype=np.float64)
        _same_length(phi, phi_pub)
        deviation = phi - phi_pub
    else:
        deviation = phi
    return float(np.mean(np.abs(deviation) <= C))
