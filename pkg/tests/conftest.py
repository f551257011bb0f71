import sys

sys.path.append("..")

import numpy as np
import pytest

from providers.ngram import train_ngram
from providers.provider import LogitProvider, build_context
from providers.vocabulary import Vocabulary

TRAINING_TEXTS = ["abc", "abca", "cab", "bca", "aab"]


class RandomLogitProvider(LogitProvider):
    """Logits drawn from a normal law seeded by the full context, so the same
    context always gets the same vector."""

    def __init__(self, vocabulary: Vocabulary, seed: int = 0, scale: float = 2.0):
        super().__init__(vocabulary)
        self.seed = seed
        self.scale = scale
        self.calls = 0
        self.requests = 0

    def logits(self, batch):
        self.check_batch(batch)
        self.calls += 1
        self.requests += len(batch)
        vectors = []
        for request in batch:
            context = build_context(request)
            rng = np.random.default_rng([self.seed, len(context), *context])
            vectors.append(rng.normal(0.0, self.scale, self.vocabulary.size))
        return vectors


class TableLogitProvider(LogitProvider):
    """Fixed logits per reference, independent of the prefix.

    public is returned for public requests, private[reference] otherwise.
    """

    def __init__(self, vocabulary: Vocabulary, public, private: dict):
        super().__init__(vocabulary)
        self.public = np.asarray(public, dtype=np.float64)
        self.private = {
            tuple(key): np.asarray(value, dtype=np.float64)
            for key, value in private.items()
        }

    def logits(self, batch):
        self.check_batch(batch)
        return [
            self.public.copy()
            if request.is_public
            else self.private[request.reference].copy()
            for request in batch
        ]


@pytest.fixture
def vocabulary():
    # a, b, c and <eos> at index 3
    return Vocabulary.from_texts(TRAINING_TEXTS)


@pytest.fixture
def ngram_provider(vocabulary):
    corpus = [vocabulary.encode(text) for text in TRAINING_TEXTS]
    return train_ngram(corpus, order=2, smoothing_alpha=0.5, vocabulary=vocabulary)


@pytest.fixture
def random_provider(vocabulary):
    return RandomLogitProvider(vocabulary)
