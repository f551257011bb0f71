import sys

sys.path.append("..")

import numpy as np
import pytest
import requests

from common.exceptions import ContextTooLongError, VocabularyMismatchError
from providers.ngram import NGramProvider
from providers.provider import LogitRequest, build_context, same_vocabulary
from providers.remote import RemoteLogitsProvider
from providers.vocabulary import Vocabulary


def test_empty_reference_is_public():
    assert LogitRequest(reference=()).is_public
    assert LogitRequest().is_public
    assert not LogitRequest(reference=[1]).is_public


def test_build_context_layout_and_separator():
    request = LogitRequest(query=[1], reference=[2, 2], prefix=[3])
    assert build_context(request) == [1, 2, 2, 3]
    assert build_context(request, separator=0) == [1, 0, 2, 2, 0, 3]
    assert build_context(request, ("reference", "query", "prefix")) == [2, 2, 1, 3]
    public = LogitRequest(query=[1], prefix=[3])
    assert build_context(public, separator=0) == [1, 0, 3]
    with pytest.raises(ValueError):
        build_context(request, ("query", "prefix"))


def test_check_batch(ngram_provider):
    with pytest.raises(ValueError):
        ngram_provider.logits([])
    with pytest.raises(VocabularyMismatchError):
        ngram_provider.logits([LogitRequest(prefix=[7])])


def test_context_too_long(ngram_provider, vocabulary):
    provider = NGramProvider(
        vocabulary,
        ngram_provider.order,
        ngram_provider.alpha,
        ngram_provider.count_table(),
        max_context=3,
    )
    provider.logits([LogitRequest(query=[0], reference=[1], prefix=[2])])
    with pytest.raises(ContextTooLongError):
        provider.logits([LogitRequest(query=[0], reference=[1, 1], prefix=[2])])


def test_same_vocabulary(ngram_provider, vocabulary):
    same_vocabulary(ngram_provider, vocabulary)
    with pytest.raises(VocabularyMismatchError):
        same_vocabulary(ngram_provider, Vocabulary(("x", "<eos>"), 1))


@pytest.fixture
def served_remote(mocker, vocabulary, ngram_provider):
    """A remote provider whose server answers with the n-gram model."""

    def serve(url, json, timeout):
        vectors = [
            ngram_provider.logits(
                [LogitRequest(item["query"], item["reference"], item["prefix"])]
            )[0].tolist()
            for item in json["requests"]
        ]
        answer = mocker.Mock()
        answer.status_code = 200
        answer.json.return_value = {
            "logits": vectors,
            "vocab_hash": vocabulary.vocab_hash(),
        }
        return answer

    mocker.patch.object(requests.Session, "post", side_effect=serve)
    return RemoteLogitsProvider("127.0.0.1:8000", vocabulary)


MIXED_BATCH = [
    LogitRequest(query=[0], reference=[1, 2], prefix=[0]),
    LogitRequest(query=[0], prefix=[0]),
    LogitRequest(query=[0], reference=(), prefix=[0]),
    LogitRequest(query=[0], reference=[1, 2], prefix=[0]),
    LogitRequest(query=[2, 1], reference=[0], prefix=[1, 1, 2]),
]


@pytest.mark.parametrize("provider_name", ["ngram_provider", "served_remote"])
def test_batch_equals_singletons(request, provider_name):
    provider = request.getfixturevalue(provider_name)
    batched = provider.logits(MIXED_BATCH)
    assert len(batched) == len(MIXED_BATCH)
    for item, vector in zip(MIXED_BATCH, batched):
        assert np.array_equal(vector, provider.logits([item])[0])
    # identical requests, and empty versus absent reference
    assert np.array_equal(batched[0], batched[3])
    assert np.array_equal(batched[1], batched[2])
