"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: urlinitialization.py                                            |
|     Authors: dp-decode contributors                                          |
| Description: Class to store the remote logits server endpoints               |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import urllib.parse


class UrlInitialization:
    def __init__(self, ip: str) -> None:
        """Initialize the URL Initialization object

        Args:
            self:        self
            ip (str):    the logits server address, hostname or base URL
        """
        self.HOME_URL = validate_url(ip)

        # Logits API
        self.API_URL = self.HOME_URL + "/v1/"
        self.LOGITS_URL = self.API_URL + "logits"


def validate_url(ip: str) -> str:
    """Validate and format a user-provided URL

    A bare host ("localhost:8000") gets the http scheme, an explicit scheme is
    kept, and trailing slashes are dropped so endpoint paths can be appended.

    Args:
        ip (str): a user-provided URL

    Returns:
        p.geturl() (str): the validated/formatted URL
    """
    if ip is None or not ip.strip():
        raise ValueError("no logits server URL given")

    ip = ip.strip()
    if "://" not in ip:
        ip = "http://" + ip
    p = urllib.parse.urlparse(ip)
    if p.scheme not in ("http", "https"):
        raise ValueError(f"unsupported URL scheme {p.scheme!r} in {ip!r}")
    if not p.netloc:
        raise ValueError(f"no host in URL {ip!r}")
    p = urllib.parse.ParseResult(p.scheme, p.netloc, p.path.rstrip("/"), "", "", "")

    return p.geturl()
