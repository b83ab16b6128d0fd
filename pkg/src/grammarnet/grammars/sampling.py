"""Rejection sampling of labeled strings from grammar instances.

Each level has a candidate scheme mirroring how its strings are built
(walks through a table, complement walks, tiled units, paired halves).
Every candidate is then checked against the oracle and kept only when the
verdict matches the requested label, so a corpus can never contain a
mislabeled string; the budget makes degenerate instances a hard error
instead of a hang.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..alphabet import ALPHABET_SIZE, DEFAULT_ALPHABET, STRING_LENGTH
from .instances import (
    CfVariant,
    GrammarInstance,
    Level,
    PERIODS,
    generate_instance,
)
from .oracles import accepts_batch
from .tables import TransitionTable

#: Candidate strings tried per requested string before giving up.
REJECTION_BUDGET = 10_000

#: Consecutive instance seeds tried by :func:`feasible_instance`.
FEASIBILITY_RETRIES = 32

HALF = STRING_LENGTH // 2
THIRD = STRING_LENGTH // 3


class GenerationError(RuntimeError):
    """Raised when an instance cannot produce a requested string."""


class Label(str, Enum):
    GRAMMATICAL = "grammatical"
    UNGRAMMATICAL = "ungrammatical"


@dataclass(frozen=True)
class LabeledString:
    text: str
    label: Label
    level: Level
    k: int
    instance_seed: int


def _walk_batch(table: TransitionTable, rng, n: int, length: int) -> np.ndarray:
    """(n, length) walks whose every contextual window is legal in ``table``."""
    targets = table.targets()
    degree = table.out_degree
    walks = np.empty((n, length), dtype=np.int64)
    if table.context_width == 1:
        walks[:, 0] = rng.integers(ALPHABET_SIZE, size=n)
        start = 1
    else:
        bigrams = rng.integers(ALPHABET_SIZE**2, size=n)
        walks[:, 0] = bigrams // ALPHABET_SIZE
        if length == 1:
            return walks[:, :1]
        walks[:, 1] = bigrams % ALPHABET_SIZE
        start = 2
    for t in range(start, length):
        if table.context_width == 1:
            context = walks[:, t - 1]
        else:
            context = walks[:, t - 2] * ALPHABET_SIZE + walks[:, t - 1]
        walks[:, t] = targets[context, rng.integers(degree, size=n)]
    return walks


def _uniform_over(letters, rng, n: int) -> np.ndarray:
    letters = np.asarray(letters, dtype=np.int64)
    return letters[rng.integers(len(letters), size=(n, STRING_LENGTH))]


def _mso_periods(instance: GrammarInstance, label: Label) -> list[int]:
    grammatical = [p for p in PERIODS if (STRING_LENGTH // p) % instance.modulus == 0]
    if label is Label.GRAMMATICAL:
        return grammatical
    return [p for p in PERIODS if p not in grammatical]


def _mso_candidates(instance: GrammarInstance, label: Label, rng, n: int) -> np.ndarray:
    periods = _mso_periods(instance, label)
    choice = rng.integers(len(periods), size=n)
    out = np.empty((n, STRING_LENGTH), dtype=np.int64)
    for i, period in enumerate(periods):  # fixed order keeps draws deterministic
        rows = np.flatnonzero(choice == i)
        if rows.size == 0:
            continue
        units = _walk_batch(instance.table, rng, rows.size, period)
        out[rows] = np.tile(units, STRING_LENGTH // period)
    return out


def _paired_positions(rng, table: TransitionTable, firsts: np.ndarray) -> np.ndarray:
    """For each entry of ``firsts``, a table-legal continuation letter."""
    targets = table.targets()
    picks = rng.integers(table.out_degree, size=firsts.shape)
    return targets[firsts, picks]


def _cf_candidates(instance: GrammarInstance, label: Label, rng, n: int) -> np.ndarray:
    table = instance.table
    variant = instance.cf_variant
    if variant == CfVariant.ANBN:
        # First half free; each position pairs with position + 6 through the
        # table (complement table for the ungrammatical scheme).
        pair_table = table if label is Label.GRAMMATICAL else table.complement()
        first = rng.integers(ALPHABET_SIZE, size=(n, HALF))
        second = _paired_positions(rng, pair_table, first)
        return np.concatenate([first, second], axis=1)
    half = _walk_batch(table, rng, n, HALF)
    repeat = np.concatenate([half, half], axis=1)
    mirror = np.concatenate([half, half[:, ::-1]], axis=1)
    if variant == CfVariant.REPEATED:
        return repeat if label is Label.GRAMMATICAL else mirror
    return mirror if label is Label.GRAMMATICAL else repeat


def _cs_candidates(instance: GrammarInstance, label: Label, rng, n: int) -> np.ndarray:
    first_table, second_table = instance.tables
    if label is Label.UNGRAMMATICAL:
        first_table = first_table.complement()
        second_table = second_table.complement()
    a = rng.integers(ALPHABET_SIZE, size=(n, THIRD))
    b = _paired_positions(rng, first_table, a)
    c = _paired_positions(rng, second_table, b)
    return np.concatenate([a, b, c], axis=1)


def _candidate_batch(instance: GrammarInstance, label: Label, rng, n: int) -> np.ndarray:
    level = instance.level
    if level == Level.SL and instance.k == 1:
        subset = np.array(instance.letter_subset, dtype=np.int64)
        if label is Label.GRAMMATICAL:
            return _uniform_over(subset, rng, n)
        complement = np.setdiff1d(np.arange(ALPHABET_SIZE), subset)
        return _uniform_over(complement, rng, n)
    if level == Level.SL:
        table = instance.table if label is Label.GRAMMATICAL else instance.table.complement()
        return _walk_batch(table, rng, n, STRING_LENGTH)
    if level in (Level.LT, Level.LTT, Level.LTTO):
        # Both labels walk the legal table; the oracle filter sorts
        # constraint-satisfying walks from constraint-violating ones.
        return _walk_batch(instance.table, rng, n, STRING_LENGTH)
    if level == Level.MSO:
        return _mso_candidates(instance, label, rng, n)
    if level == Level.CF:
        return _cf_candidates(instance, label, rng, n)
    if level == Level.CS:
        return _cs_candidates(instance, label, rng, n)
    raise ValueError(f"unhandled level {level!r}")


def _matching_candidates(instance, label, rng, n: int) -> np.ndarray:
    candidates = _candidate_batch(instance, label, rng, n)
    verdicts = accepts_batch(instance, candidates)
    wanted = verdicts if label is Label.GRAMMATICAL else ~verdicts
    return candidates[wanted]


def _collect(instance: GrammarInstance, label: Label, rng, count: int) -> list[str]:
    """Up to ``count`` labeled strings, spending at most count * budget candidates."""
    label = Label(label)
    budget = REJECTION_BUDGET * count
    spent = 0
    kept: list[str] = []
    batch = 64
    while len(kept) < count:
        n = min(batch, budget - spent)
        if n <= 0:
            raise GenerationError(
                f"gave up after {spent} candidates while sampling "
                f"{label.value} strings from instance [{instance.describe()}]"
            )
        matches = _matching_candidates(instance, label, rng, n)
        spent += n
        for row in matches[: count - len(kept)]:
            kept.append(instance.alphabet.decode(row))
        batch = min(batch * 2, 1024)
    return kept


def sample_string(instance: GrammarInstance, label: Label, rng) -> LabeledString:
    """One string whose oracle verdict matches ``label``.

    Draws candidates from the instance's scheme until one passes, up to
    REJECTION_BUDGET attempts; exhausting the budget raises
    :class:`GenerationError` naming the instance.
    """
    rng = np.random.default_rng(rng)
    text = _collect(instance, label, rng, 1)[0]
    return LabeledString(text, Label(label), instance.level, instance.k, instance.seed)


def build_corpus(instance: GrammarInstance, per_class: int, rng) -> list[LabeledString]:
    """``per_class`` grammatical then ``per_class`` ungrammatical strings.

    Every string's label is verified against the oracle before inclusion,
    so no string can appear under both labels. Order within each class is
    generation order; the whole list is deterministic in ``rng``.
    """
    if per_class < 1:
        raise ValueError(f"per_class must be positive, got {per_class}")
    rng = np.random.default_rng(rng)
    corpus = []
    for label in (Label.GRAMMATICAL, Label.UNGRAMMATICAL):
        for text in _collect(instance, label, rng, per_class):
            corpus.append(LabeledString(text, label, instance.level, instance.k, instance.seed))
    return corpus


def feasible_instance(level, k: int | None = None, seed: int = 0, **kwargs) -> GrammarInstance:
    """Like :func:`generate_instance`, but bumps the seed past degenerate draws.

    An instance that cannot produce both labels within the rejection budget
    (for example constraints that never co-occur in twelve letters) is
    discarded and the next seed is tried.
    """
    last_error = None
    for attempt in range(FEASIBILITY_RETRIES):
        instance = generate_instance(level, k, seed + attempt, **kwargs)
        probe = np.random.default_rng((instance.seed, 1))
        try:
            for label in (Label.GRAMMATICAL, Label.UNGRAMMATICAL):
                _collect(instance, label, probe, 1)
            return instance
        except GenerationError as err:
            last_error = err
    raise GenerationError(
        f"no feasible instance for level={level} k={k} within "
        f"{FEASIBILITY_RETRIES} seeds starting at {seed}: {last_error}"
    )
