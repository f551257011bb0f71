"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: vocabulary.py                                                   |
|     Authors: dp-decode contributors                                          |
| Description: Character vocabularies, token sequences and logit vector checks |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from common.exceptions import VocabularyMismatchError


log = logging.getLogger(__name__)

EOS_TOKEN = "<eos>"

# A token sequence is a list of indices into a Vocabulary (prefixes, queries,
# references and generations are all token sequences).
TokenSequence = Sequence[int]


@dataclass(frozen=True)
class Vocabulary:
    """An ordered list of unique token strings with a designated EOS token."""

    tokens: tuple
    eos_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if len(self.tokens) < 2:
            raise ValueError("a vocabulary needs at least two tokens")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("vocabulary tokens must be unique")
        if not 0 <= self.eos_index < len(self.tokens):
            raise ValueError(
                f"eos_index {self.eos_index} outside [0, {len(self.tokens)})"
            )

    @property
    def size(self) -> int:
        return len(self.tokens)

    @property
    def eos_token(self) -> str:
        return self.tokens[self.eos_index]

    @cached_property
    def index(self) -> dict:
        return {token: position for position, token in enumerate(self.tokens)}

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "Vocabulary":
        """Build a character-level vocabulary: sorted characters, then EOS.

        Args:
            texts (Iterable[str]): the training texts

        Returns:
            Vocabulary: one token per distinct character plus EOS_TOKEN
        """
        characters = sorted(set("".join(texts)))
        return cls(tuple(characters) + (EOS_TOKEN,), len(characters))

    def encode(self, text: str, skip_unknown: bool = False) -> list:
        """Turn a text into token indices, one per character.

        Args:
            text (str):           the text to encode
            skip_unknown (bool):  drop characters outside the vocabulary instead
                                  of failing

        Returns:
            list: the token indices
        """
        indices = []
        unknown = 0
        for character in text:
            position = self.index.get(character)
            if position is None:
                if not skip_unknown:
                    raise VocabularyMismatchError(
                        f"character {character!r} is not in the vocabulary"
                    )
                unknown += 1
                continue
            indices.append(position)
        if unknown:
            log.warning("Skipped %d character(s) outside the vocabulary", unknown)
        return indices

    def decode(self, indices: TokenSequence, strip_eos: bool = True) -> str:
        """Turn token indices back into text.

        Args:
            indices (TokenSequence): the token indices
            strip_eos (bool):        leave EOS tokens out of the text

        Returns:
            str: the decoded text
        """
        self.check_sequence(indices)
        return "".join(
            self.tokens[index]
            for index in indices
            if not (strip_eos and index == self.eos_index)
        )

    def check_sequence(self, indices: TokenSequence) -> None:
        """Raise VocabularyMismatchError if an index is out of range."""
        for index in indices:
            if not 0 <= int(index) < self.size:
                raise VocabularyMismatchError(
                    f"token index {index} outside vocabulary of size {self.size}"
                )

    def to_dict(self) -> dict:
        return {"tokens": list(self.tokens), "eos_index": self.eos_index}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        return cls(tuple(data["tokens"]), int(data["eos_index"]))

    def vocab_hash(self) -> str:
        """SHA-256 of the canonical JSON form, shared with the logits server."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as vocabulary_file:
            json.dump(self.to_dict(), vocabulary_file, sort_keys=True, indent=1)
            vocabulary_file.write("\n")

    @classmethod
    def load(cls, path: str) -> "Vocabulary":
        with open(path, "r", encoding="utf-8") as vocabulary_file:
            return cls.from_dict(json.load(vocabulary_file))


def as_logit_vector(values: Iterable[float], size: int) -> np.ndarray:
    """Validate one logit vector against a vocabulary size.

    Args:
        values (Iterable[float]): the raw scores
        size (int):               the vocabulary size |V|

    Returns:
        np.ndarray: the scores as a float64 vector of length size
    """
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != size:
        raise VocabularyMismatchError(
            f"logit vector of shape {vector.shape} for a vocabulary of size {size}"
        )
    if not np.all(np.isfinite(vector)):
        raise VocabularyMismatchError("logit vector has NaN or infinite entries")
    return vector
