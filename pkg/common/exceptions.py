"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: exceptions.py                                                   |
|     Authors: dp-decode contributors                                          |
| Description: Exception hierarchy shared by the providers, the accountant,    |
|              the decoding engine and the command scripts, plus the mapping   |
|              from exceptions to process exit codes.                          |
|                                                                              |
|------------------------------------------------------------------------------|
"""

from typing import Optional

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_PROVIDER = 3
EXIT_STATE_SPACE = 4


class DecodingError(Exception):
    """Base class for every error raised on purpose by dp-decode."""

    exit_code = EXIT_FAILURE


class ConfigError(DecodingError, ValueError):
    """Invalid configuration, flags or parameters (usage error)."""

    exit_code = EXIT_USAGE


class CalibrationError(ConfigError):
    """The clip norm could not be derived from the configuration."""


class UnsupportedAdjacencyError(ConfigError):
    """An adjacency notion that cannot be used for privacy accounting."""


class AccountingError(DecodingError):
    """Internal failure of a numerical accounting routine."""


class ProviderError(DecodingError):
    """A logit provider could not answer a batch of requests."""

    exit_code = EXIT_PROVIDER
    retryable = False


class ContextTooLongError(ProviderError):
    """The concatenated context exceeds the provider's declared maximum."""


class VocabularyMismatchError(ProviderError):
    """Token indices or logit vectors do not match the provider vocabulary."""


class ProviderTransportError(ProviderError):
    """The remote provider could not be reached; the call may be retried."""

    retryable = True


class GenerationError(ProviderError):
    """A provider failure while decoding, tagged with where it happened.

    Args:
        message (str):        description of the failure
        batch_index (int):    index of the reference batch being decoded
        position (int):       1-based position of the token being generated
    """

    def __init__(self, message: str, batch_index: int, position: int) -> None:
        super().__init__(
            f"batch {batch_index}, token {position}: {message}"
        )
        self.batch_index = batch_index
        self.position = position


class CorpusGenerationError(DecodingError):
    """One or more batches failed while generating a corpus.

    Args:
        errors (dict):   batch index -> error message
        records (list):  records of the batches that succeeded
        report:          the accounting report, valid for the partial corpus
    """

    exit_code = EXIT_PROVIDER

    def __init__(self, errors: dict, records: list, report: Optional[object]) -> None:
        super().__init__(
            f"{len(errors)} batch(es) failed: "
            + ", ".join(str(index) for index in sorted(errors))
        )
        self.errors = errors
        self.records = records
        self.report = report


class StateSpaceGuardError(DecodingError):
    """Exhaustive enumeration would exceed the configured state-space limit."""

    exit_code = EXIT_STATE_SPACE


def exit_code(exception: BaseException) -> int:
    """Map an exception raised by a command to its process exit code.

    Args:
        exception (BaseException): the exception caught by the command script

    Returns:
        int: the documented exit code
    """
    if isinstance(exception, DecodingError):
        return exception.exit_code
    if isinstance(exception, (ValueError, OSError, KeyError)):
        return EXIT_USAGE
    return EXIT_FAILURE
