"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: sessionhandler.py                                               |
|     Authors: dp-decode contributors                                          |
| Description: Class to open and close HTTP sessions to a remote logits server |
|              gracefully, with authentication and transport retries           |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
from typing import Optional

import requests
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry

from common.urlinitialization import UrlInitialization


log = logging.getLogger(__name__)

# Statuses worth retrying: the server is up but momentarily unable to answer.
RETRY_STATUSES = (429, 502, 503, 504)


class SessionHandler:
    def __init__(
        self,
        token: Optional[str],
        urls: UrlInitialization,
        no_verify: bool = False,
        retries: int = 3,
        backoff_factor: float = 0.5,
    ) -> None:
        """Initialize the session handler object

        Args:
            self:                      self
            token (str):               bearer token for the logits server, or None
            urls (UrlInitialization):  the logits server URLs
            no_verify (bool):          if set, TLS certificates are not verified
            retries (int):             transport retries per request
            backoff_factor (float):    urllib3 exponential backoff factor
        """
        log.debug("Initializing the logits session for %s", urls.HOME_URL)
        self.session = requests.Session()
        if token:
            self.session.headers.update({"Authorization": "Bearer " + token})
        self.session.headers.update({"Content-Type": "application/json"})
        if no_verify:
            self.session.verify = False

        retry = Retry(
            total=retries,
            backoff_factor=backoff_factor,
            status_forcelist=RETRY_STATUSES,
            allowed_methods=frozenset({"POST"}),
            raise_on_status=False,
        )
        adapter = HTTPAdapter(max_retries=retry)
        self.session.mount("http://", adapter)
        self.session.mount("https://", adapter)

    def __enter__(self) -> requests.Session:
        """Return the session

        Args:
            self: self
        """
        return self.session

    def __exit__(self, exception_type, exception, traceback) -> None:
        """Close the session and its pooled connections

        Args:
            self: self
        """
        log.debug("Closing logits session")
        self.session.close()
