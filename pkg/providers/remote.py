"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: remote.py                                                       |
|     Authors: dp-decode contributors                                          |
| Description: Client for a remote JSON-over-HTTP logits server                |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
from typing import Optional, Sequence

import requests

from common.exceptions import (
    ContextTooLongError,
    ProviderError,
    ProviderTransportError,
    VocabularyMismatchError,
)
from common.sessionhandler import SessionHandler
from common.urlinitialization import UrlInitialization
from providers.provider import DEFAULT_MAX_CONTEXT, LogitProvider, LogitRequest
from providers.vocabulary import Vocabulary, as_logit_vector


log = logging.getLogger(__name__)


class RemoteLogitsProvider(LogitProvider):
    """Logits fetched with POST /v1/logits.

    Request body:  {"vocab_hash": str, "requests": [{"query": [int],
                    "reference": [int] | null, "prefix": [int]}]}
    Response body: {"logits": [[float, ...], ...]}

    Servers must send raw logits as the model produced them: a per-vector
    shift does not change a softmax but it does change what gets clipped.
    A 409 response, a "vocab_hash" in the response that differs from ours, or
    vectors of the wrong length mean the server uses another vocabulary.
    Each call opens its own session, so concurrent callers fail independently.
    """

    def __init__(
        self,
        url: str,
        vocabulary: Vocabulary,
        token: Optional[str] = None,
        max_context: int = DEFAULT_MAX_CONTEXT,
        timeout: float = 30.0,
        retries: int = 3,
        no_verify: bool = False,
    ) -> None:
        """Initialize the remote provider

        Args:
            url (str):                 base URL of the logits server
            vocabulary (Vocabulary):   the vocabulary shared with the server
            token (str):               bearer token, or None
            max_context (int):         longest accepted request context
            timeout (float):           seconds per HTTP attempt
            retries (int):             transport retries per call
            no_verify (bool):          skip TLS certificate verification
        """
        super().__init__(vocabulary, max_context)
        self.urls = UrlInitialization(url)
        self.token = token
        self.timeout = timeout
        self.retries = retries
        self.no_verify = no_verify
        self.vocab_hash = vocabulary.vocab_hash()

    def request_body(self, batch: Sequence[LogitRequest]) -> dict:
        return {
            "vocab_hash": self.vocab_hash,
            "requests": [
                {
                    "query": list(request.query),
                    "reference": (
                        None if request.reference is None else list(request.reference)
                    ),
                    "prefix": list(request.prefix),
                }
                for request in batch
            ],
        }

    def logits(self, batch: Sequence[LogitRequest]) -> list:
        self.check_batch(batch)
        body = self.request_body(batch)
        try:
            with SessionHandler(
                self.token, self.urls, self.no_verify, retries=self.retries
            ) as session:
                response = session.post(
                    url=self.urls.LOGITS_URL, json=body, timeout=self.timeout
                )
        except requests.exceptions.RequestException as error:
            raise ProviderTransportError(
                f"logits server {self.urls.HOME_URL} unreachable: {error}"
            ) from error
        log.debug("POST %s -> %s", self.urls.LOGITS_URL, response.status_code)

        if response.status_code == 409:
            raise VocabularyMismatchError(
                f"logits server rejected vocabulary hash {self.vocab_hash}"
            )
        if response.status_code == 413:
            raise ContextTooLongError("logits server rejected the context length")
        if response.status_code >= 500 or response.status_code == 429:
            raise ProviderTransportError(
                f"logits server answered {response.status_code} after retries"
            )
        if response.status_code >= 400:
            raise ProviderError(
                f"logits server answered {response.status_code}: {response.text}"
            )

        try:
            payload = response.json()
            vectors = payload["logits"]
        except (ValueError, KeyError, TypeError) as error:
            raise ProviderError(f"malformed logits response: {error}") from error
        server_hash = payload.get("vocab_hash")
        if server_hash is not None and server_hash != self.vocab_hash:
            raise VocabularyMismatchError(
                f"logits server vocabulary {server_hash} != {self.vocab_hash}"
            )
        if len(vectors) != len(batch):
            raise ProviderError(
                f"asked for {len(batch)} logit vectors, received {len(vectors)}"
            )
        return [as_logit_vector(vector, self.vocabulary.size) for vector in vectors]
