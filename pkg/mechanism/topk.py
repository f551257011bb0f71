"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: topk.py                                                         |
|     Authors: dp-decode contributors                                          |
| Description: Expanded Top-k+ vocabulary built from the public logits only,   |
|              and the containment check it is designed to pass                |
|                                                                              |
|------------------------------------------------------------------------------|
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from mechanism.clipping import clip


@dataclass(frozen=True, eq=False)
class TopKPlusSet:
    """V_k (core) and its expansion V_k+ (members) at one decoding step.

    ell is the k-th largest public logit; members are the tokens whose public
    logit is at least ell - expansion, ties included.
    """

    k: int
    ell: float
    expansion: float
    members: np.ndarray
    core: np.ndarray

    @property
    def effective_k(self) -> int:
        return int(self.members.size)

    @property
    def expansion_members(self) -> np.ndarray:
        """Tokens of V_k+ that are not in V_k."""
        return np.setdiff1d(self.members, self.core)

    def __contains__(self, index: int) -> bool:
        return bool(np.isin(index, self.members))

    def in_core(self, index: int) -> bool:
        return bool(np.isin(index, self.core))


def kth_largest(values: np.ndarray, k: int) -> float:
    """Value at rank k of the descending sort."""
    values = np.asarray(values, dtype=np.float64)
    if not 1 <= k <= values.size:
        raise ValueError(f"k={k} outside [1, {values.size}]")
    return float(np.sort(values)[::-1][k - 1])


def top_k_set(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of every token scoring at least the k-th largest value."""
    values = np.asarray(values, dtype=np.float64)
    return np.flatnonzero(values >= kth_largest(values, k))


def expanded_top_vocabulary(
    phi_pub: np.ndarray,
    k: Optional[int],
    C: float,
    B: int,
    margin: Optional[float] = None,
) -> TopKPlusSet:
    """Build V_k+ = {y : phi_pub(y) >= ell - 2C/B}.

    Only public logits are used, so the set carries no privacy cost.

    Args:
        phi_pub (np.ndarray):  public logits
        k (int):               top-k parameter; None means k = |V|
        C (float):             clip norm
        B (int):               references per batch
        margin (float):        expansion below ell; defaults to 2C/B

    Returns:
        TopKPlusSet: ell, V_k and V_k+
    """
    phi_pub = np.asarray(phi_pub, dtype=np.float64)
    if k is None:
        k = phi_pub.size
    if C < 0:
        raise ValueError(f"clip norm C must be non-negative, got {C}")
    if B < 1:
        raise ValueError(f"batch size B must be positive, got {B}")
    if margin is None:
        margin = 2 * C / B
    ell = kth_largest(phi_pub, k)
    return TopKPlusSet(
        k=k,
        ell=ell,
        expansion=margin,
        members=np.flatnonzero(phi_pub >= ell - margin),
        core=np.flatnonzero(phi_pub >= ell),
    )


def standalone_contribution(
    phi: np.ndarray, phi_pub: np.ndarray, C: float, B: int
) -> np.ndarray:
    """Aggregated logits if every other reference carried no private signal."""
    phi = np.asarray(phi, dtype=np.float64)
    phi_pub = np.asarray(phi_pub, dtype=np.float64)
    return phi_pub + clip(phi - phi_pub, C) / B


def superset_check(
    phis: Sequence[np.ndarray],
    phi_pub: np.ndarray,
    k: Optional[int],
    C: float,
    B: int,
    margin: Optional[float] = None,
) -> bool:
    """True iff every reference's standalone top-k set lies inside V_k+.

    Args:
        phis (Sequence[np.ndarray]):  private logits, one per reference
        phi_pub (np.ndarray):         public logits
        k (int):                      top-k parameter
        C (float):                    clip norm
        B (int):                      references per batch
        margin (float):               expansion used for V_k+ (2C/B if None)

    Returns:
        bool: whether the containment holds for all references
    """
    allowed = expanded_top_vocabulary(phi_pub, k, C, B, margin)
    members = set(allowed.members.tolist())
    for phi in phis:
        contribution = standalone_contribution(phi, phi_pub, C, B)
        if not set(top_k_set(contribution, allowed.k).tolist()) <= members:
            return False
    return True
