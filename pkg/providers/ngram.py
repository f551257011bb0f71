"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: ngram.py                                                        |
|     Authors: dp-decode contributors                                          |
| Description: Deterministic character n-gram provider with add-alpha smoothing|
|              and back-off, plus its versioned JSON model file                |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import json
import logging
from typing import Optional, Sequence

import numpy as np

from providers.provider import (
    DEFAULT_CONTEXT_LAYOUT,
    DEFAULT_MAX_CONTEXT,
    LogitProvider,
    LogitRequest,
    build_context,
)
from providers.vocabulary import TokenSequence, Vocabulary


log = logging.getLogger(__name__)

MODEL_MAGIC = "DPDECODE-NGRAM"
MODEL_FORMAT_VERSION = 1


class NGramProvider(LogitProvider):
    """Logits are log P(y | context) of an add-alpha smoothed n-gram model.

    The conditional distribution is read from the longest suffix of the
    context (at most order - 1 tokens) that was seen in training; shorter
    suffixes are tried until one was seen, ending at the unigram counts.
    """

    def __init__(
        self,
        vocabulary: Vocabulary,
        order: int,
        alpha: float,
        counts: dict,
        max_context: int = DEFAULT_MAX_CONTEXT,
        context_layout: Sequence[str] = DEFAULT_CONTEXT_LAYOUT,
        separator: Optional[int] = None,
    ) -> None:
        """Initialize the provider from count tables

        Args:
            vocabulary (Vocabulary):  the token vocabulary
            order (int):              n of the n-gram model
            alpha (float):            additive smoothing constant
            counts (dict):            context tuple -> count vector of length |V|
            max_context (int):        longest accepted request context
            context_layout (Sequence[str]): order of query, reference and prefix
            separator (int):          token between context segments, or None
        """
        super().__init__(vocabulary, max_context)
        if order < 1:
            raise ValueError("n-gram order must be at least 1")
        if not alpha > 0:
            raise ValueError("smoothing alpha must be positive")
        if () not in counts:
            raise ValueError("count tables have no unigram entry")
        if separator is not None and not 0 <= separator < vocabulary.size:
            raise ValueError(f"separator index {separator} outside the vocabulary")
        self.order = order
        self.alpha = float(alpha)
        self.context_layout = tuple(context_layout)
        self.separator = separator
        self._counts = {
            tuple(key): np.asarray(row, dtype=np.int64) for key, row in counts.items()
        }
        self._totals = {key: int(row.sum()) for key, row in self._counts.items()}

    def history(self, context: TokenSequence) -> tuple:
        """The longest seen suffix of the context, at most order - 1 tokens."""
        width = min(self.order - 1, len(context))
        suffix = tuple(context[len(context) - width:])
        for start in range(len(suffix) + 1):
            if suffix[start:] in self._counts:
                return suffix[start:]
        return ()

    def distribution(self, context: TokenSequence) -> np.ndarray:
        """Smoothed next-token probabilities after the given context.

        Args:
            context (TokenSequence): the full context token indices

        Returns:
            np.ndarray: probabilities over the vocabulary
        """
        key = self.history(context)
        counts = self._counts[key]
        denominator = self._totals[key] + self.alpha * self.vocabulary.size
        return (counts + self.alpha) / denominator

    def logits(self, batch: Sequence[LogitRequest]) -> list:
        self.check_batch(batch)
        vectors = []
        for request in batch:
            context = build_context(request, self.context_layout, self.separator)
            vectors.append(np.log(self.distribution(context)))
        log.debug("Answered %d n-gram logit requests", len(batch))
        return vectors

    def count_table(self) -> dict:
        """Copy of the count tables, keyed by context tuple."""
        return {key: row.copy() for key, row in self._counts.items()}

    def save(self, path: str) -> None:
        """Write the model as a self-describing, versioned JSON file.

        Output is byte-identical for identical models.

        Args:
            path (str): destination file
        """
        payload = {
            "magic": MODEL_MAGIC,
            "format_version": MODEL_FORMAT_VERSION,
            "order": self.order,
            "alpha": self.alpha,
            "vocabulary": self.vocabulary.to_dict(),
            "context": {
                "layout": list(self.context_layout),
                "separator": self.separator,
                "max_context": self.max_context,
            },
            "counts": {
                ",".join(str(index) for index in key): {
                    str(token): int(count)
                    for token, count in enumerate(row)
                    if count
                }
                for key, row in self._counts.items()
            },
        }
        with open(path, "w", encoding="utf-8") as model_file:
            json.dump(payload, model_file, sort_keys=True, indent=1)
            model_file.write("\n")

    @classmethod
    def load(cls, path: str, **overrides) -> "NGramProvider":
        """Read a model written by save().

        Args:
            path (str):  the model file
            overrides:   provider settings replacing the stored "context" ones
                         (max_context, context_layout, separator)

        Returns:
            NGramProvider: the provider
        """
        with open(path, "r", encoding="utf-8") as model_file:
            payload = json.load(model_file)
        if not isinstance(payload, dict) or payload.get("magic") != MODEL_MAGIC:
            raise ValueError(f"{path} is not a dp-decode n-gram model file")
        if payload.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format version {payload.get('format_version')}"
            )
        vocabulary = Vocabulary.from_dict(payload["vocabulary"])
        counts = {}
        for key, row in payload["counts"].items():
            context = tuple(int(index) for index in key.split(",")) if key else ()
            vector = np.zeros(vocabulary.size, dtype=np.int64)
            for token, count in row.items():
                vector[int(token)] = count
            counts[context] = vector
        stored = payload.get("context", {})
        settings = {
            "max_context": stored.get("max_context", DEFAULT_MAX_CONTEXT),
            "context_layout": stored.get("layout", DEFAULT_CONTEXT_LAYOUT),
            "separator": stored.get("separator"),
        }
        settings.update(overrides)
        return cls(vocabulary, payload["order"], payload["alpha"], counts, **settings)


def train_ngram(
    corpus: Sequence[TokenSequence],
    order: int,
    smoothing_alpha: float,
    vocabulary: Vocabulary,
    **provider_settings,
) -> NGramProvider:
    """Count n-grams of every order up to `order` over a tokenized corpus.

    Every sequence is terminated by EOS before counting; contexts are never
    padded, so the first token of a sequence only feeds the unigram table.

    Args:
        corpus (Sequence[TokenSequence]): the training sequences
        order (int):                      n of the n-gram model (>= 1)
        smoothing_alpha (float):          additive smoothing constant (> 0)
        vocabulary (Vocabulary):          the vocabulary of the sequences
        provider_settings:                forwarded to NGramProvider

    Returns:
        NGramProvider: the trained provider
    """
    if order < 1:
        raise ValueError("n-gram order must be at least 1")
    if not corpus:
        raise ValueError("cannot train an n-gram model on an empty corpus")

    counts = {}
    for sequence in corpus:
        vocabulary.check_sequence(sequence)
        tokens = list(sequence)
        if not tokens or tokens[-1] != vocabulary.eos_index:
            tokens.append(vocabulary.eos_index)
        for position, token in enumerate(tokens):
            for length in range(min(order - 1, position) + 1):
                key = tuple(tokens[position - length:position])
                if key not in counts:
                    counts[key] = np.zeros(vocabulary.size, dtype=np.int64)
                counts[key][token] += 1

    log.info(
        "Trained order-%d n-gram model on %d sequences (%d contexts)",
        order,
        len(corpus),
        len(counts),
    )
    return NGramProvider(
        vocabulary, order, smoothing_alpha, counts, **provider_settings
    )
