import sys

sys.path.append("..")

import pytest
import requests

from common.exceptions import (
    ContextTooLongError,
    ProviderError,
    ProviderTransportError,
    VocabularyMismatchError,
)
from providers.provider import LogitRequest
from providers.remote import RemoteLogitsProvider


def response(mocker, status_code=200, payload=None):
    fake = mocker.Mock()
    fake.status_code = status_code
    fake.text = "server message"
    fake.json.return_value = payload
    return fake


@pytest.fixture
def remote(vocabulary):
    return RemoteLogitsProvider("127.0.0.1:8000/", vocabulary, token="secret")


BATCH = [LogitRequest(query=[0]), LogitRequest(query=[0], reference=[1, 2])]


def test_logits_posts_batch(mocker, remote, vocabulary):
    post = mocker.patch.object(
        requests.Session,
        "post",
        return_value=response(
            mocker,
            payload={
                "logits": [[0, 1, 2, 3], [3, 2, 1, 0]],
                "vocab_hash": vocabulary.vocab_hash(),
            },
        ),
    )
    vectors = remote.logits(BATCH)
    assert [list(vector) for vector in vectors] == [[0, 1, 2, 3], [3, 2, 1, 0]]
    assert post.call_count == 1
    kwargs = post.call_args.kwargs
    assert kwargs["url"] == "http://127.0.0.1:8000/v1/logits"
    assert kwargs["json"]["vocab_hash"] == vocabulary.vocab_hash()
    assert kwargs["json"]["requests"][0]["reference"] is None
    assert kwargs["json"]["requests"][1]["reference"] == [1, 2]


@pytest.mark.parametrize(
    "status_code, exception",
    [
        (409, VocabularyMismatchError),
        (413, ContextTooLongError),
        (503, ProviderTransportError),
        (429, ProviderTransportError),
        (400, ProviderError),
    ],
)
def test_error_statuses(mocker, remote, status_code, exception):
    mocker.patch.object(
        requests.Session, "post", return_value=response(mocker, status_code)
    )
    with pytest.raises(exception):
        remote.logits(BATCH)


def test_unreachable_server_is_retryable(mocker, remote):
    mocker.patch.object(
        requests.Session,
        "post",
        side_effect=requests.exceptions.ConnectionError("refused"),
    )
    with pytest.raises(ProviderTransportError) as excinfo:
        remote.logits(BATCH)
    assert excinfo.value.retryable


@pytest.mark.parametrize(
    "payload, exception",
    [
        ({"logits": [[0, 1, 2]] * 2}, VocabularyMismatchError),
        ({"logits": [[0, 1, 2, 3]]}, ProviderError),
        (
            {"logits": [[0, 1, 2, 3]] * 2, "vocab_hash": "other"},
            VocabularyMismatchError,
        ),
        ({"no_logits": []}, ProviderError),
    ],
)
def test_malformed_responses(mocker, remote, payload, exception):
    mocker.patch.object(
        requests.Session, "post", return_value=response(mocker, payload=payload)
    )
    with pytest.raises(exception):
        remote.logits(BATCH)
