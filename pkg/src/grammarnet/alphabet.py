"""Shared letter alphabet and the fixed string domain used by every grammar."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Length of every string in the corpus, grammatical or not.
STRING_LENGTH = 12

#: Number of letters in an alphabet.
ALPHABET_SIZE = 6


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of six distinct single-character letters.

    The ordering is meaningful: position in ``letters`` is the letter's
    one-hot index everywhere downstream (encoders, transition tables).
    """

    letters: tuple[str, ...] = ("a", "b", "c", "d", "e", "f")

    def __post_init__(self):
        if len(self.letters) != ALPHABET_SIZE:
            raise ValueError(
                f"alphabet needs exactly {ALPHABET_SIZE} letters, got {len(self.letters)}"
            )
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("alphabet letters must be distinct")
        if any(not isinstance(ch, str) or len(ch) != 1 for ch in self.letters):
            raise ValueError("alphabet letters must be single characters")

    @property
    def size(self) -> int:
        return len(self.letters)

    def index(self, letter: str) -> int:
        """One-hot index of ``letter``; foreign characters are an error."""
        try:
            return self.letters.index(letter)
        except ValueError:
            raise ValueError(
                f"letter {letter!r} is not in alphabet {''.join(self.letters)!r}"
            ) from None

    def encode(self, text: str) -> np.ndarray:
        """Letter indices of ``text`` as an int array."""
        return np.array([self.index(ch) for ch in text], dtype=np.int64)

    def decode(self, indices) -> str:
        """Inverse of :meth:`encode`."""
        return "".join(self.letters[int(i)] for i in indices)


DEFAULT_ALPHABET = Alphabet()


def check_string(text: str, alphabet: Alphabet = DEFAULT_ALPHABET) -> np.ndarray:
    """Validate length and letters of ``text``, returning its index array."""
    if not isinstance(text, str):
        raise ValueError(f"expected a string, got {type(text).__name__}")
    if len(text) != STRING_LENGTH:
        raise ValueError(f"strings must have length {STRING_LENGTH}, got {len(text)}")
    return alphabet.encode(text)
