"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: metrics.py                                                      |
|     Authors: dp-decode contributors                                          |
| Description: Perplexity gap, generation length and Top-k+ statistics of      |
|              generated texts                                                 |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import log_softmax

from generation.engine import GenerationRecord
from providers.provider import LogitProvider, LogitRequest


log = logging.getLogger(__name__)

Z_99 = 2.576


def perplexity(
    x: Sequence[int], eval_provider: LogitProvider, query: Sequence[int] = ()
) -> float:
    """exp of the mean negative log-likelihood of x under the evaluation model.

    All prefixes of x are scored in one provider call.

    Args:
        x (Sequence[int]):              the token sequence, at least one token
        eval_provider (LogitProvider):  the evaluation model
        query (Sequence[int]):          optional conditioning context

    Returns:
        float: the perplexity
    """
    x = [int(token) for token in x]
    if not x:
        raise ValueError("perplexity of an empty sequence is undefined")
    requests = [LogitRequest(query, None, x[:t]) for t in range(len(x))]
    vectors = eval_provider.logits(requests)
    log_likelihood = sum(
        float(log_softmax(vector)[token]) for vector, token in zip(vectors, x)
    )
    return math.exp(-log_likelihood / len(x))


def terminated(sequence: Sequence[int], eos_index: int) -> list:
    """The sequence with EOS appended unless it already ends with it."""
    sequence = list(sequence)
    if not sequence or sequence[-1] != eos_index:
        sequence.append(eos_index)
    return sequence


def reference_perplexities(
    references: Sequence[Sequence[int]], eval_provider: LogitProvider
) -> list:
    """Perplexities of the references, each scored with EOS appended."""
    eos = eval_provider.vocabulary.eos_index
    return [perplexity(terminated(r, eos), eval_provider) for r in references]


def wald_interval(values: Sequence[float], z: float = Z_99) -> tuple:
    """Normal-approximation interval mean +- z * s / sqrt(m).

    Returns:
        tuple: (mean, lower, upper)
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("interval of an empty sample")
    mean = float(values.mean())
    if values.size == 1:
        return mean, mean, mean
    half_width = z * float(values.std(ddof=1)) / math.sqrt(values.size)
    return mean, mean - half_width, mean + half_width


def ppl_gaps(
    generated_ppls: Sequence[float], reference_ppls: Sequence[float]
) -> np.ndarray:
    """|PPL(x) - mean reference PPL| for every generation x."""
    if len(generated_ppls) == 0 or len(reference_ppls) == 0:
        raise ValueError("perplexity gap needs generations and references")
    reference_mean = float(np.mean(reference_ppls))
    return np.abs(np.asarray(generated_ppls, dtype=np.float64) - reference_mean)


def delta_ppl_from_perplexities(
    generated_ppls: Sequence[float], reference_ppls: Sequence[float]
) -> float:
    return float(ppl_gaps(generated_ppls, reference_ppls).mean())


def delta_ppl(
    generated: Sequence[Sequence[int]],
    references: Sequence[Sequence[int]],
    eval_provider: LogitProvider,
) -> float:
    """Mean over generations of the absolute gap to the mean reference
    perplexity. References are scored with EOS appended."""
    if not generated or not references:
        raise ValueError("delta_ppl needs at least one generation and one reference")
    return delta_ppl_from_perplexities(
        [perplexity(x, eval_provider) for x in generated],
        reference_perplexities(references, eval_provider),
    )


def delta_ppl_ci(
    generated: Sequence[Sequence[int]],
    references: Sequence[Sequence[int]],
    eval_provider: LogitProvider,
    z: float = Z_99,
) -> tuple:
    """99% Wald interval (lower, upper) of delta_ppl."""
    if not generated or not references:
        raise ValueError("delta_ppl needs at least one generation and one reference")
    gaps = ppl_gaps(
        [perplexity(x, eval_provider) for x in generated],
        reference_perplexities(references, eval_provider),
    )
    _, lower, upper = wald_interval(gaps, z)
    return lower, upper


def length_statistics(records: Sequence[GenerationRecord]) -> tuple:
    """Mean length and {length: count} histogram of the generations."""
    lengths = [len(record.tokens) for record in records]
    histogram = dict(sorted(Counter(lengths).items()))
    return float(np.mean(lengths)), histogram


def topk_statistics(records: Sequence[GenerationRecord]) -> Optional[dict]:
    """Effective-k and expansion statistics from the per-step traces.

    Returns None when a record was generated without a trace.
    """
    if not records or any(record.trace is None for record in records):
        return None
    steps = [step for record in records for step in record.trace]
    if not steps:
        return None
    expansion_counts = [
        sum(step.from_expansion for step in record.trace) for record in records
    ]
    return {
        "effective_k_mean": float(np.mean([step.effective_k for step in steps])),
        "expansion_tokens_mean": float(np.mean(expansion_counts)),
        "expansion_token_share": sum(expansion_counts) / len(steps),
    }


@dataclass(frozen=True)
class MetricReport:
    delta_ppl: float
    delta_ppl_ci: tuple
    mean_reference_ppl: float
    num_generations: int
    mean_length: float
    length_histogram: dict
    finished_by: dict
    effective_k_mean: Optional[float] = None
    expansion_tokens_mean: Optional[float] = None
    expansion_token_share: Optional[float] = None
    perplexities: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "delta_ppl": self.delta_ppl,
            "delta_ppl_ci99": list(self.delta_ppl_ci),
            "mean_reference_ppl": self.mean_reference_ppl,
            "num_generations": self.num_generations,
            "mean_length": self.mean_length,
            "length_histogram": {
                str(length): count for length, count in self.length_histogram.items()
            },
            "finished_by": self.finished_by,
            "effective_k_mean": self.effective_k_mean,
            "expansion_tokens_mean": self.expansion_tokens_mean,
            "expansion_token_share": self.expansion_token_share,
        }


def evaluate(
    records: Sequence[GenerationRecord],
    references: Sequence[Sequence[int]],
    eval_provider: LogitProvider,
) -> MetricReport:
    """Score generations against references under a held-out model.

    References are scored with EOS appended, like generations that stopped
    at EOS.

    Args:
        records (Sequence[GenerationRecord]):  the generations
        references (Sequence[Sequence[int]]):  the reference texts
        eval_provider (LogitProvider):         the evaluation model

    Returns:
        MetricReport: the metrics
    """
    if not records or not references:
        raise ValueError("evaluation needs at least one generation and one reference")
    generated_ppls = [perplexity(record.tokens, eval_provider) for record in records]
    reference_ppls = reference_perplexities(references, eval_provider)
    gaps = ppl_gaps(generated_ppls, reference_ppls)
    mean_gap, lower, upper = wald_interval(gaps)
    mean_length, histogram = length_statistics(records)
    topk = topk_statistics(records) or {}
    log.info("Evaluated %d generations: delta PPL %.4f", len(records), mean_gap)
    return MetricReport(
        delta_ppl=mean_gap,
        delta_ppl_ci=(lower, upper),
        mean_reference_ppl=float(np.mean(reference_ppls)),
        num_generations=len(records),
        mean_length=mean_length,
        length_histogram=histogram,
        finished_by=dict(Counter(record.finished_by for record in records)),
        effective_k_mean=topk.get("effective_k_mean"),
        expansion_tokens_mean=topk.get("expansion_tokens_mean"),
        expansion_token_share=topk.get("expansion_token_share"),
        perplexities=tuple(generated_ppls),
    )
