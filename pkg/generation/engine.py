"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: engine.py                                                       |
|     Authors: dp-decode contributors                                          |
| Description: Reference batching, the per-token decoding loop and corpus      |
|              generation with its privacy report                              |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
from concurrent import futures
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from accounting.budget import PARALLEL, AccountingReport, build_report
from accounting.notions import ConversionMethod
from common.exceptions import (
    ConfigError,
    CorpusGenerationError,
    GenerationError,
    ProviderError,
)
from generation.config import GenerationConfig
from mechanism.clipping import aggregate
from mechanism.sampling import sample_token
from mechanism.topk import expanded_top_vocabulary
from providers.provider import (
    LogitProvider,
    LogitRequest,
    same_vocabulary,
    zero_logits,
)
from providers.vocabulary import Vocabulary


log = logging.getLogger(__name__)

FINISHED_EOS = "eos"
FINISHED_BUDGET = "budget_T"


@dataclass(frozen=True)
class Dataset:
    """The sensitive references, in dataset order, and the vocabulary they
    were encoded with when known."""

    references: tuple
    vocabulary: Optional[Vocabulary] = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "references",
            tuple(tuple(int(i) for i in reference) for reference in self.references),
        )

    @property
    def N(self) -> int:
        return len(self.references)

    def num_batches(self, B: int) -> int:
        return self.N // B

    def leftover(self, B: int) -> int:
        return self.N - self.num_batches(B) * B

    @classmethod
    def from_texts(
        cls, texts: Iterable[str], vocabulary: Vocabulary, skip_unknown: bool = False
    ) -> "Dataset":
        return cls(
            tuple(vocabulary.encode(text, skip_unknown=skip_unknown) for text in texts),
            vocabulary,
        )


@dataclass(frozen=True)
class ReferenceBatch:
    """Query q and the B references R of one generation.

    A reference of None is the zero-out null element: its logits are the zero
    vector and it costs no provider request. An empty reference is the
    replace-by-null element and is answered with the public logits.
    """

    query: tuple
    references: tuple
    batch_index: int = 0
    indices: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "query", tuple(int(i) for i in self.query))
        object.__setattr__(
            self,
            "references",
            tuple(
                None if reference is None else tuple(int(i) for i in reference)
                for reference in self.references
            ),
        )
        if not self.references:
            raise ConfigError("a reference batch needs at least one reference")

    @property
    def B(self) -> int:
        return len(self.references)


@dataclass(frozen=True)
class StepTrace:
    """Public-only statistics of one decoding step."""

    position: int
    token: int
    effective_k: int
    expansion_size: int
    from_expansion: bool


@dataclass(frozen=True)
class GenerationRecord:
    tokens: tuple
    finished_by: str
    batch_index: int
    provider_requests: int = 0
    trace: Optional[tuple] = None


def partition(dataset: Dataset, B: int, query: Sequence[int] = ()) -> list:
    """Split the dataset into floor(N / B) disjoint batches by position.

    Batch j holds references j*B .. (j+1)*B - 1; the N mod B trailing
    references are left unused.

    Args:
        dataset (Dataset):        the references
        B (int):                  references per batch
        query (Sequence[int]):    the public query shared by every batch

    Returns:
        list: the ReferenceBatch list
    """
    if B < 1:
        raise ConfigError(f"B must be a positive integer, got {B}")
    if dataset.N < B:
        raise ConfigError(f"dataset of {dataset.N} references is smaller than B={B}")
    batches = [
        ReferenceBatch(
            query=tuple(query),
            references=dataset.references[j * B:(j + 1) * B],
            batch_index=j,
            indices=tuple(range(j * B, (j + 1) * B)),
        )
        for j in range(dataset.num_batches(B))
    ]
    leftover = dataset.leftover(B)
    if leftover:
        log.warning(
            "Dropping %d trailing reference(s): %d is not a multiple of B=%d",
            leftover,
            dataset.N,
            B,
        )
    log.info("Partitioned %d references into %d batches", dataset.N, len(batches))
    return batches


def step_logits(
    batch: ReferenceBatch, prefix: Sequence[int], provider: LogitProvider
) -> tuple:
    """Private and public logits for the next token, in one provider call.

    Args:
        batch (ReferenceBatch):   query and references
        prefix (Sequence[int]):   tokens generated so far
        provider (LogitProvider): the logit source

    Returns:
        tuple: (list of B private vectors, public vector, requests issued)
    """
    requests = [LogitRequest(batch.query, None, prefix)]
    for reference in batch.references:
        if reference is not None:
            requests.append(LogitRequest(batch.query, reference, prefix))
    vectors = iter(provider.logits(requests))
    phi_pub = next(vectors)
    phis = [
        zero_logits(provider.vocabulary) if reference is None else next(vectors)
        for reference in batch.references
    ]
    return phis, phi_pub, len(requests)


def mechanism_step(
    config: GenerationConfig, phis: Sequence[np.ndarray], phi_pub: np.ndarray
) -> tuple:
    """Clip and aggregate the private logits and build V_k+.

    Returns:
        tuple: (AggregatedLogits, TopKPlusSet)
    """
    allowed = expanded_top_vocabulary(phi_pub, config.k, config.C, config.B)
    agg = aggregate(phis, phi_pub, config.clip)
    return agg, allowed


def batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    """Random stream of one batch; independent of scheduling order."""
    return np.random.default_rng([seed, batch_index])


def generate_one(
    config: GenerationConfig,
    batch: ReferenceBatch,
    provider: LogitProvider,
    rng: Optional[np.random.Generator] = None,
) -> GenerationRecord:
    """Decode one synthetic text from a batch of references.

    Each step issues one provider call with B + 1 requests, samples a token
    from softmax(aggregated[V_k+] / tau) and stops at EOS or after T tokens.

    Args:
        config (GenerationConfig):  calibrated configuration
        batch (ReferenceBatch):     query and B references
        provider (LogitProvider):   the logit source
        rng (Generator):            random stream, batch_rng(seed, index) if None

    Returns:
        GenerationRecord: the generated tokens and how decoding ended
    """
    config.require_calibrated()
    if batch.B != config.B:
        raise ConfigError(f"batch holds {batch.B} references but B={config.B}")
    if rng is None:
        rng = batch_rng(config.seed, batch.batch_index)
    eos = provider.vocabulary.eos_index

    tokens = []
    trace = []
    requests = 0
    finished_by = FINISHED_BUDGET
    for position in range(1, config.T + 1):
        try:
            phis, phi_pub, issued = step_logits(batch, tokens, provider)
        except ProviderError as e:
            raise GenerationError(str(e), batch.batch_index, position) from e
        requests += issued
        agg, allowed = mechanism_step(config, phis, phi_pub)
        token = sample_token(agg, allowed, config.tau, rng)
        if config.collect_trace:
            expansion = allowed.expansion_members
            trace.append(
                StepTrace(
                    position=position,
                    token=token,
                    effective_k=allowed.effective_k,
                    expansion_size=int(expansion.size),
                    from_expansion=not allowed.in_core(token),
                )
            )
        tokens.append(token)
        if token == eos:
            finished_by = FINISHED_EOS
            break

    log.debug(
        "Batch %d: %d tokens, finished by %s",
        batch.batch_index,
        len(tokens),
        finished_by,
    )
    return GenerationRecord(
        tokens=tuple(tokens),
        finished_by=finished_by,
        batch_index=batch.batch_index,
        provider_requests=requests,
        trace=tuple(trace) if config.collect_trace else None,
    )


def count_requests(records: Iterable[GenerationRecord], B: int) -> int:
    """Provider requests implied by the records: (B + 1) per generated token."""
    return sum((B + 1) * len(record.tokens) for record in records)


def request_upper_bound(n: int, B: int, T: int) -> int:
    """Most provider requests n generations can issue."""
    return n * (B + 1) * T


def account(
    config: GenerationConfig,
    num_batches: int,
    delta: Optional[float] = None,
    method: ConversionMethod = ConversionMethod.TIGHT,
    unused_references: int = 0,
    batch_composition: str = PARALLEL,
) -> AccountingReport:
    """Privacy report of a calibrated configuration over num_batches batches.

    delta and method default to those of the calibration target, if any.
    """
    config.require_calibrated()
    if delta is None and config.calibrated_from is not None:
        delta = config.calibrated_from.delta
        method = config.calibrated_from.conversion_method or method
    return build_report(
        C=config.C,
        B=config.B,
        tau=config.tau,
        T=config.T,
        strategy=config.strategy,
        adjacency=config.adjacency,
        num_batches=num_batches,
        delta=delta,
        method=method,
        k=config.k,
        unused_references=unused_references,
        batch_composition=batch_composition,
    )


def generate_corpus(
    config: GenerationConfig,
    dataset: Dataset,
    provider: LogitProvider,
    query: Sequence[int] = (),
    jobs: int = 1,
    delta: Optional[float] = None,
    method: ConversionMethod = ConversionMethod.TIGHT,
) -> tuple:
    """Generate one text per disjoint batch of the dataset.

    The report is computed before decoding starts, from T and the number of
    batches only. Batches run on up to `jobs` threads; a failing batch does
    not stop the others, and all failures are raised together at the end.

    Args:
        config (GenerationConfig):  the configuration, calibrated if needed
        dataset (Dataset):          the references
        provider (LogitProvider):   the logit source
        query (Sequence[int]):      the public query
        jobs (int):                 number of worker threads
        delta (float):              delta of the reported epsilon
        method (ConversionMethod):  zCDP conversion of the reported epsilon

    Returns:
        tuple: (records sorted by batch index, AccountingReport)
    """
    if jobs < 1:
        raise ConfigError(f"jobs must be a positive integer, got {jobs}")
    config = config.calibrated()
    batches = partition(dataset, config.B, query)
    if dataset.vocabulary is not None:
        same_vocabulary(provider, dataset.vocabulary)
    report = account(
        config,
        len(batches),
        delta=delta,
        method=method,
        unused_references=dataset.leftover(config.B),
    )

    records = []
    errors = {}
    with futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        pending = {
            pool.submit(generate_one, config, batch, provider): batch.batch_index
            for batch in batches
        }
        for future in futures.as_completed(pending):
            batch_index = pending[future]
            try:
                records.append(future.result())
            except ProviderError as e:
                log.error("Batch %d failed: %s", batch_index, e)
                errors[batch_index] = str(e)

    records.sort(key=lambda record: record.batch_index)
    if errors:
        raise CorpusGenerationError(errors, records, report)
    log.info(
        "Generated %d texts with %d provider requests",
        len(records),
        sum(record.provider_requests for record in records),
    )
    return records, report
