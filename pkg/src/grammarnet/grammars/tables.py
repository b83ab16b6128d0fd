"""Boolean transition tables keyed by a letter or bigram context."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..alphabet import ALPHABET_SIZE

#: Context widths a table may have: previous letter, or previous bigram.
VALID_WIDTHS = (1, 2)

#: Out-degrees grammars are built with (complements may have other degrees).
VALID_DEGREES = (3, 5)


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """Legal continuations: one row per context, one column per next letter.

    For ``context_width == 1`` rows are keyed by the previous letter index
    (6 rows). For ``context_width == 2`` they are keyed by the previous
    ordered bigram, row ``6 * first + second`` (36 rows). Every row carries
    the same number of true entries.
    """

    context_width: int
    rows: np.ndarray

    def __post_init__(self):
        if self.context_width not in VALID_WIDTHS:
            raise ValueError(f"context_width must be one of {VALID_WIDTHS}")
        rows = np.asarray(self.rows, dtype=bool)
        expected = (ALPHABET_SIZE ** self.context_width, ALPHABET_SIZE)
        if rows.shape != expected:
            raise ValueError(f"rows must have shape {expected}, got {rows.shape}")
        degrees = rows.sum(axis=1)
        if degrees.min() < 1:
            raise ValueError("every context needs at least one legal continuation")
        if np.unique(degrees).size != 1:
            raise ValueError("all rows must share one out-degree")
        object.__setattr__(self, "rows", rows)

    @property
    def n_contexts(self) -> int:
        return self.rows.shape[0]

    @property
    def out_degree(self) -> int:
        return int(self.rows[0].sum())

    def targets(self) -> np.ndarray:
        """Legal next letters per context, shape (n_contexts, out_degree), ascending."""
        ctx, letters = np.nonzero(self.rows)
        return letters.reshape(self.n_contexts, self.out_degree)

    def complement(self) -> TransitionTable:
        """Table holding exactly the illegal continuations of this one."""
        return TransitionTable(self.context_width, ~self.rows)

    def allows(self, context: int, letter: int) -> bool:
        return bool(self.rows[context, letter])

    def equals(self, other: TransitionTable) -> bool:
        return self.context_width == other.context_width and np.array_equal(
            self.rows, other.rows
        )


def build_transition_table(context_width: int, out_degree: int, rng) -> TransitionTable:
    """Sample a table with exactly ``out_degree`` uniform-random true entries per row.

    ``rng`` may be an integer seed or a ``numpy.random.Generator``; the same
    seed always yields the same table.
    """
    if context_width not in VALID_WIDTHS:
        raise ValueError(f"context_width must be one of {VALID_WIDTHS}, got {context_width}")
    if out_degree not in VALID_DEGREES:
        raise ValueError(f"out_degree must be one of {VALID_DEGREES}, got {out_degree}")
    rng = np.random.default_rng(rng)
    n_contexts = ALPHABET_SIZE ** context_width
    rows = np.zeros((n_contexts, ALPHABET_SIZE), dtype=bool)
    for i in range(n_contexts):
        rows[i, rng.choice(ALPHABET_SIZE, size=out_degree, replace=False)] = True
    return TransitionTable(context_width, rows)
