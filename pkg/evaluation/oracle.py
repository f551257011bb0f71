"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: oracle.py                                                       |
|     Authors: dp-decode contributors                                          |
| Description: Exact output law of the decoder by enumeration, adjacent        |
|              reference batches and Renyi divergence checks                   |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from accounting.notions import AdjacencyNotion, require_accountable
from common.exceptions import StateSpaceGuardError
from generation.config import GenerationConfig
from generation.engine import ReferenceBatch, mechanism_step, step_logits
from mechanism.sampling import token_distribution
from providers.provider import LogitProvider


log = logging.getLogger(__name__)

STATE_SPACE_LIMIT = 10**6
ALPHA_GRID = (1.5, 2, 4, 8, 16, 32)
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ExactDistribution:
    """Probability of every complete output sequence."""

    probabilities: Mapping

    def __post_init__(self) -> None:
        total = sum(self.probabilities.values())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def __getitem__(self, sequence: tuple) -> float:
        return self.probabilities.get(tuple(sequence), 0.0)

    @property
    def support(self) -> set:
        return {sequence for sequence, p in self.probabilities.items() if p > 0}

    def total(self) -> float:
        return float(sum(self.probabilities.values()))


Distribution = Union[ExactDistribution, Mapping]


def _as_mapping(distribution: Distribution) -> Mapping:
    if isinstance(distribution, ExactDistribution):
        return distribution.probabilities
    return distribution


def exact_distribution(
    config: GenerationConfig,
    batch: ReferenceBatch,
    provider: LogitProvider,
    limit: int = STATE_SPACE_LIMIT,
) -> ExactDistribution:
    """Enumerate every output of generate_one with its exact probability.

    Uses the same logits, aggregation, V_k+ and softmax as the decoder, so
    sampling generate_one converges to this law.

    Args:
        config (GenerationConfig):  the configuration, calibrated if needed
        batch (ReferenceBatch):     query and references
        provider (LogitProvider):   the logit source
        limit (int):                largest |V|^T that may be enumerated

    Returns:
        ExactDistribution: sequence -> probability
    """
    config = config.calibrated()
    size = provider.vocabulary.size
    if size**config.T > limit:
        raise StateSpaceGuardError(
            f"|V|^T = {size}^{config.T} exceeds the state-space limit of {limit}"
        )
    eos = provider.vocabulary.eos_index

    probabilities = {}
    stack = [((), 1.0)]
    while stack:
        prefix, mass = stack.pop()
        phis, phi_pub, _ = step_logits(batch, prefix, provider)
        agg, allowed = mechanism_step(config, phis, phi_pub)
        step = token_distribution(agg, allowed, config.tau)
        for token in np.flatnonzero(step > 0):
            sequence = prefix + (int(token),)
            p = mass * float(step[token])
            if token == eos or len(sequence) == config.T:
                probabilities[sequence] = probabilities.get(sequence, 0.0) + p
            else:
                stack.append((sequence, p))
    log.debug("Enumerated %d output sequences", len(probabilities))
    return ExactDistribution(probabilities)


def empirical_distribution(sequences: Iterable[Sequence[int]]) -> ExactDistribution:
    counts = Counter(tuple(int(token) for token in sequence) for sequence in sequences)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("empirical distribution of no samples")
    return ExactDistribution({sequence: n / total for sequence, n in counts.items()})


def total_variation(P: Distribution, Q: Distribution) -> float:
    P, Q = _as_mapping(P), _as_mapping(Q)
    return 0.5 * sum(
        abs(P.get(sequence, 0.0) - Q.get(sequence, 0.0)) for sequence in set(P) | set(Q)
    )


def renyi_divergence(P: Distribution, Q: Distribution, alpha: float) -> float:
    """D_alpha(P || Q), computed in log space.

    Infinite when P puts mass where Q has none.
    """
    if not alpha > 1:
        raise ValueError(f"Renyi order alpha must exceed 1, got {alpha}")
    P, Q = _as_mapping(P), _as_mapping(Q)
    support = [sequence for sequence, p in P.items() if p > 0]
    if any(Q.get(sequence, 0.0) <= 0 for sequence in support):
        return math.inf
    log_p = np.log([P[sequence] for sequence in support])
    log_q = np.log([Q[sequence] for sequence in support])
    return float(logsumexp(alpha * log_p + (1 - alpha) * log_q) / (alpha - 1))


def adjacent_batch(
    batch: ReferenceBatch, index: int, adjacency: AdjacencyNotion
) -> ReferenceBatch:
    """The batch with reference `index` replaced by the null element.

    replace_by_null puts the empty reference in its place; zero_out puts the
    element whose logits are identically zero.
    """
    adjacency = require_accountable(adjacency)
    if not 0 <= index < batch.B:
        raise ValueError(f"reference index {index} outside batch of size {batch.B}")
    null = () if adjacency is AdjacencyNotion.REPLACE_BY_NULL else None
    references = list(batch.references)
    references[index] = null
    return ReferenceBatch(
        batch.query, tuple(references), batch.batch_index, batch.indices
    )


@dataclass(frozen=True)
class Certificate:
    alpha: float
    divergence: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.divergence <= self.bound + SUM_TOLERANCE


def certify_zcdp(
    P: Distribution,
    Q: Distribution,
    rho: float,
    alphas: Sequence[float] = ALPHA_GRID,
) -> list:
    """Check D_alpha(P || Q) <= rho * alpha in both directions.

    Returns:
        list: one Certificate per alpha, holding the larger of the two
                          directions
    """
    certificates = []
    for alpha in alphas:
        forward = renyi_divergence(P, Q, alpha)
        backward = renyi_divergence(Q, P, alpha)
        certificates.append(Certificate(alpha, max(forward, backward), rho * alpha))
    violations = [c for c in certificates if not c.holds]
    if violations:
        log.warning("zCDP bound violated at alpha=%s", [c.alpha for c in violations])
    return certificates
