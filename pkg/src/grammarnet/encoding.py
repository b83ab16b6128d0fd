"""One-hot string encoding, sliding windows, and train/test splitting.

Target convention used everywhere: ``1.0`` marks an ungrammatical string,
``0.0`` a grammatical one. A predicted probability is therefore the
network's belief that the string is ungrammatical.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.base import BaseEstimator, TransformerMixin

from .alphabet import ALPHABET_SIZE, DEFAULT_ALPHABET, STRING_LENGTH, check_string
from .grammars import Label, LabeledString

#: Width of the flat encoding: one block of 6 per string position.
FULL_WIDTH = STRING_LENGTH * ALPHABET_SIZE


def _check_window(window: int) -> int:
    if not isinstance(window, (int, np.integer)) or not 1 <= window <= STRING_LENGTH:
        raise ValueError(f"window must be an integer in 1..{STRING_LENGTH}, got {window!r}")
    return int(window)


def target_of(label: Label) -> float:
    return 1.0 if Label(label) is Label.UNGRAMMATICAL else 0.0


@dataclass(frozen=True)
class EncodedExample:
    """Features plus the 0/1 target for a single labeled string."""

    features: np.ndarray
    target: float


def one_hot(text: str, alphabet=DEFAULT_ALPHABET) -> np.ndarray:
    """(12, 6) position-major one-hot matrix for a validated string."""
    indices = check_string(text, alphabet)
    grid = np.zeros((STRING_LENGTH, ALPHABET_SIZE), dtype=np.float64)
    grid[np.arange(STRING_LENGTH), indices] = 1.0
    return grid


def encode_full(text: str, alphabet=DEFAULT_ALPHABET) -> np.ndarray:
    """Flat 72-vector: the bit for position ``i``, letter ``j`` sits at ``6 i + j``."""
    return one_hot(text, alphabet).reshape(FULL_WIDTH)


def encode_windows(text: str, window: int, alphabet=DEFAULT_ALPHABET) -> np.ndarray:
    """Step-major sliding windows, shape ``(12 - window + 1, 6 * window)``.

    Window 12 degenerates to a single step equal to :func:`encode_full`.
    """
    window = _check_window(window)
    grid = one_hot(text, alphabet)
    steps = STRING_LENGTH - window + 1
    return sliding_window_view(grid, window, axis=0).transpose(0, 2, 1).reshape(steps, -1)


def encode_example(item: LabeledString, window: int | None = None) -> EncodedExample:
    if window is None:
        features = encode_full(item.text)
    else:
        features = encode_windows(item.text, window)
    return EncodedExample(features, target_of(item.label))


def encode_corpus(items, window: int | None = None, alphabet=DEFAULT_ALPHABET):
    """Stack a corpus into ``(X, y)`` arrays.

    ``window=None`` gives flat features ``(n, 72)``; otherwise step-major
    sequences ``(n, steps, 6 * window)``.
    """
    texts = [getattr(item, "text", item) for item in items]
    if window is None:
        X = np.stack([encode_full(text, alphabet) for text in texts]) if texts else np.empty((0, FULL_WIDTH))
    else:
        window = _check_window(window)
        steps = STRING_LENGTH - window + 1
        if texts:
            X = np.stack([encode_windows(text, window, alphabet) for text in texts])
        else:
            X = np.empty((0, steps, ALPHABET_SIZE * window))
    y = np.array(
        [target_of(item.label) for item in items if isinstance(item, LabeledString)],
        dtype=np.float64,
    )
    if len(y) != len(texts):  # plain strings carry no labels
        y = np.empty(0, dtype=np.float64)
    return X, y


@dataclass(frozen=True)
class SplitCorpus:
    """A disjoint train/test partition of one corpus, with its bookkeeping."""

    train: tuple[LabeledString, ...]
    test: tuple[LabeledString, ...]
    train_indices: np.ndarray
    test_indices: np.ndarray
    train_fraction: float
    split_seed: int | None

    def class_counts(self, side: str) -> dict[str, int]:
        items = getattr(self, side)
        return {
            label.value: sum(1 for item in items if item.label is label) for label in Label
        }


def split(corpus, train_fraction: float = 0.8, rng=None) -> SplitCorpus:
    """Uniform random partition of ``corpus`` into train and test sides.

    ``rng`` may be an integer seed (recorded on the result) or a Generator.
    Both sides are guaranteed non-empty.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("cannot split an empty corpus")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie strictly between 0 and 1, got {train_fraction}")
    n_train = int(round(train_fraction * len(corpus)))
    if n_train == 0 or n_train == len(corpus):
        raise ValueError(
            f"train_fraction={train_fraction} leaves an empty side for {len(corpus)} strings"
        )
    seed = int(rng) if isinstance(rng, (int, np.integer)) else None
    generator = np.random.default_rng(rng)
    order = generator.permutation(len(corpus))
    train_indices = np.sort(order[:n_train])
    test_indices = np.sort(order[n_train:])
    return SplitCorpus(
        train=tuple(corpus[i] for i in train_indices),
        test=tuple(corpus[i] for i in test_indices),
        train_indices=train_indices,
        test_indices=test_indices,
        train_fraction=train_fraction,
        split_seed=seed,
    )


def write_split_manifest(split_corpus: SplitCorpus, path) -> None:
    """Audit file: one ``side,index`` line per string, indices ascending."""
    path = Path(path)
    lines = ["side,index"]
    lines += [f"train,{i}" for i in split_corpus.train_indices]
    lines += [f"test,{i}" for i in split_corpus.test_indices]
    path.write_text("\n".join(lines) + "\n")


class FullStringEncoder(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping strings to flat 72-vectors."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return np.stack([encode_full(getattr(item, "text", item)) for item in X])


class SlidingWindowEncoder(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping strings to step-major window sequences."""

    def __init__(self, window=12):
        self.window = window

    def fit(self, X, y=None):
        _check_window(self.window)
        return self

    def transform(self, X):
        window = _check_window(self.window)
        return np.stack([encode_windows(getattr(item, "text", item), window) for item in X])
