"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: budget.py                                                       |
|     Authors: dp-decode contributors                                          |
| Description: Privacy budgets and the accounting report of a generation run   |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
from dataclasses import dataclass
from typing import Optional

from accounting.notions import (
    DCLIP,
    AdjacencyNotion,
    ClippingStrategy,
    ConversionMethod,
    parse_method,
    require_accountable,
)
from accounting.zcdp import (
    compose_parallel,
    compose_sequence,
    eps_to_zcdp,
    rho_per_token,
    zcdp_to_eps,
)


log = logging.getLogger(__name__)

PARALLEL = "parallel"
SEQUENTIAL = "sequential"


@dataclass(frozen=True)
class PrivacyBudget:
    """A zCDP budget, optionally with the (epsilon, delta) pair it came from
    or converts to."""

    rho: float
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    conversion_method: Optional[ConversionMethod] = None

    def __post_init__(self) -> None:
        if self.rho < 0:
            raise ValueError(f"rho must be non-negative, got {self.rho}")
        if (self.epsilon is None) != (self.delta is None):
            raise ValueError("epsilon and delta must be given together")
        if self.delta is not None and not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.conversion_method is not None:
            object.__setattr__(
                self, "conversion_method", parse_method(self.conversion_method)
            )

    @classmethod
    def from_rho(
        cls,
        rho: float,
        delta: Optional[float] = None,
        method: ConversionMethod = ConversionMethod.TIGHT,
    ) -> "PrivacyBudget":
        """A budget given directly in rho, with its epsilon at delta if asked."""
        if delta is None:
            return cls(rho)
        return cls(rho, zcdp_to_eps(rho, delta, method), delta, parse_method(method))

    @classmethod
    def from_epsilon(
        cls,
        epsilon: float,
        delta: float,
        method: ConversionMethod = ConversionMethod.TIGHT,
    ) -> "PrivacyBudget":
        """The largest rho that still converts to (epsilon, delta)-DP."""
        rho = eps_to_zcdp(epsilon, delta, method)
        return cls(rho, epsilon, delta, parse_method(method))

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "conversion_method": (
                self.conversion_method.value if self.conversion_method else None
            ),
        }


@dataclass(frozen=True)
class AccountingReport:
    """Privacy guarantee of a run, with every input it was computed from.

    sequence_rho covers one generation with token budget T; corpus_rho covers
    all generations (their maximum for disjoint batches, their sum otherwise).
    """

    per_token_rho: float
    tokens_budgeted: int
    sequence_rho: float
    batch_composition: str
    num_batches: int
    corpus_rho: float
    epsilon: Optional[float]
    delta: Optional[float]
    conversion_method: Optional[str]
    C: float
    B: int
    tau: float
    k: Optional[int]
    strategy: str
    adjacency: str
    unused_references: int = 0

    def to_dict(self) -> dict:
        return {
            "per_token_rho": self.per_token_rho,
            "tokens_budgeted": self.tokens_budgeted,
            "sequence_rho": self.sequence_rho,
            "batch_composition": self.batch_composition,
            "num_batches": self.num_batches,
            "corpus_rho": self.corpus_rho,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "conversion_method": self.conversion_method,
            "inputs": {
                "C": self.C,
                "B": self.B,
                "tau": self.tau,
                "T": self.tokens_budgeted,
                "k": self.k,
                "strategy": self.strategy,
                "adjacency": self.adjacency,
            },
            "unused_references": self.unused_references,
        }


def build_report(
    C: float,
    B: int,
    tau: float,
    T: int,
    strategy: ClippingStrategy = DCLIP,
    adjacency: AdjacencyNotion = AdjacencyNotion.REPLACE_BY_NULL,
    num_batches: int = 1,
    delta: Optional[float] = None,
    method: ConversionMethod = ConversionMethod.TIGHT,
    k: Optional[int] = None,
    unused_references: int = 0,
    batch_composition: str = PARALLEL,
) -> AccountingReport:
    """Account a run ex ante, from the token budget T and never from realized
    generation lengths.

    Args:
        C (float):                   clip norm
        B (int):                     references per batch
        tau (float):                 sampling temperature
        T (int):                     token budget per generation
        strategy (ClippingStrategy): clipping strategy
        adjacency (AdjacencyNotion): adjacency notion (add_or_remove rejected)
        num_batches (int):           number of generations
        delta (float):               delta for the epsilon column, or None
        method (ConversionMethod):   zCDP to (epsilon, delta) conversion
        k (int):                     top-k parameter, echoed only
        unused_references (int):     references left out of the partition
        batch_composition (str):     "parallel" for disjoint batches,
                                     "sequential" when batches share data

    Returns:
        AccountingReport: the report
    """
    adjacency = require_accountable(adjacency)
    method = parse_method(method)
    if num_batches < 1:
        raise ValueError("a report needs at least one batch")
    per_token = rho_per_token(C, B, tau, strategy, adjacency)
    sequence = compose_sequence(per_token, T)
    batch_rhos = [sequence] * num_batches
    if batch_composition == PARALLEL:
        corpus = compose_parallel(batch_rhos)
    elif batch_composition == SEQUENTIAL:
        corpus = sum(batch_rhos)
    else:
        raise ValueError(f"unknown batch composition {batch_composition!r}")
    epsilon = None if delta is None else zcdp_to_eps(corpus, delta, method)
    log.info(
        "Accounted %d batch(es): rho_tok=%g rho_seq=%g corpus rho=%g",
        num_batches,
        per_token,
        sequence,
        corpus,
    )
    return AccountingReport(
        per_token_rho=per_token,
        tokens_budgeted=T,
        sequence_rho=sequence,
        batch_composition=batch_composition,
        num_batches=num_batches,
        corpus_rho=corpus,
        epsilon=epsilon,
        delta=delta,
        conversion_method=method.value if delta is not None else None,
        C=C,
        B=B,
        tau=tau,
        k=k,
        strategy=str(strategy),
        adjacency=adjacency.value,
        unused_references=unused_references,
    )
