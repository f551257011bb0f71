"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: provider.py                                                     |
|     Authors: dp-decode contributors                                          |
| Description: Logit requests, context assembly and the contract every logit   |
|              provider implements                                             |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import abc
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from common.exceptions import ContextTooLongError, VocabularyMismatchError
from providers.vocabulary import Vocabulary


log = logging.getLogger(__name__)

DEFAULT_CONTEXT_LAYOUT = ("query", "reference", "prefix")
DEFAULT_MAX_CONTEXT = 4096


@dataclass(frozen=True)
class LogitRequest:
    """One next-token query: logits of phi(. | query, reference, prefix).

    A missing or empty reference asks for the public logits.
    """

    query: tuple = ()
    reference: Optional[tuple] = None
    prefix: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "query", tuple(int(i) for i in self.query))
        object.__setattr__(self, "prefix", tuple(int(i) for i in self.prefix))
        if self.reference is not None:
            reference = tuple(int(i) for i in self.reference)
            # The empty reference is the null element of replace-by-null.
            object.__setattr__(self, "reference", reference or None)

    @property
    def is_public(self) -> bool:
        return self.reference is None

    def context_length(self) -> int:
        return len(self.query) + len(self.reference or ()) + len(self.prefix)


def build_context(
    request: LogitRequest,
    layout: Sequence[str] = DEFAULT_CONTEXT_LAYOUT,
    separator: Optional[int] = None,
) -> list:
    """Concatenate the parts of a request into one context.

    Args:
        request (LogitRequest):  the request
        layout (Sequence[str]):  order of the "query", "reference" and "prefix"
                                 segments
        separator (int):         optional token placed between non-empty
                                 segments

    Returns:
        list: the context token indices
    """
    if sorted(layout) != sorted(DEFAULT_CONTEXT_LAYOUT):
        raise ValueError(f"context layout must order {DEFAULT_CONTEXT_LAYOUT}")
    segments = {
        "query": request.query,
        "reference": request.reference or (),
        "prefix": request.prefix,
    }
    context = []
    for name in layout:
        segment = segments[name]
        if not segment:
            continue
        if context and separator is not None:
            context.append(separator)
        context.extend(segment)
    return context


class LogitProvider(abc.ABC):
    """Source of next-token logits over a fixed vocabulary.

    Providers are immutable after construction, so one instance can serve
    several generation workers at once.
    """

    def __init__(
        self, vocabulary: Vocabulary, max_context: int = DEFAULT_MAX_CONTEXT
    ) -> None:
        if max_context < 1:
            raise ValueError("max_context must be positive")
        self.vocabulary = vocabulary
        self.max_context = max_context

    def check_batch(self, batch: Sequence[LogitRequest]) -> None:
        """Validate a batch before any logits are computed.

        Args:
            batch (Sequence[LogitRequest]): the requests
        """
        if not batch:
            raise ValueError("empty logit request batch")
        for request in batch:
            for part in (request.query, request.reference or (), request.prefix):
                for index in part:
                    if not 0 <= index < self.vocabulary.size:
                        raise VocabularyMismatchError(
                            f"token index {index} outside vocabulary of size "
                            + f"{self.vocabulary.size}"
                        )
            if request.context_length() > self.max_context:
                raise ContextTooLongError(
                    f"context of {request.context_length()} tokens exceeds the "
                    + f"maximum of {self.max_context}"
                )

    @abc.abstractmethod
    def logits(self, batch: Sequence[LogitRequest]) -> list:
        """Return one logit vector (np.ndarray of length |V|) per request,
        in request order."""


def same_vocabulary(provider: LogitProvider, vocabulary: Vocabulary) -> None:
    """Raise VocabularyMismatchError unless the provider uses this vocabulary."""
    if provider.vocabulary.vocab_hash() != vocabulary.vocab_hash():
        raise VocabularyMismatchError(
            "provider vocabulary does not match the expected vocabulary"
        )


def zero_logits(vocabulary: Vocabulary) -> np.ndarray:
    """Logits of the zero-out null element."""
    return np.zeros(vocabulary.size, dtype=np.float64)
