"""Pure membership decisions for every grammar level.

The scalar entry point is :func:`oracle_accepts`. Samplers and tests use
:func:`accepts_batch`, which decides many candidate strings at once; the
scalar form is a batch of one, so there is a single decision code path.
"""
from __future__ import annotations

import numpy as np

from ..alphabet import ALPHABET_SIZE, STRING_LENGTH, check_string
from .instances import CfVariant, GrammarInstance, Level, PERIODS

HALF = STRING_LENGTH // 2
THIRD = STRING_LENGTH // 3


def _transitions_legal(table, walks: np.ndarray) -> np.ndarray:
    """Whether every width-(context+1) window of each walk is in ``table``."""
    if table.context_width == 1:
        return table.rows[walks[:, :-1], walks[:, 1:]].all(axis=1)
    ctx = walks[:, :-2] * ALPHABET_SIZE + walks[:, 1:-1]
    return table.rows[ctx, walks[:, 2:]].all(axis=1)


def gram_matches(walks: np.ndarray, gram: tuple[int, ...]) -> np.ndarray:
    """Boolean (n, positions) array marking where ``gram`` occurs, overlaps included."""
    k = len(gram)
    width = walks.shape[1] - k + 1
    hits = np.ones((walks.shape[0], width), dtype=bool)
    for offset, letter in enumerate(gram):
        hits &= walks[:, offset : offset + width] == letter
    return hits


def _constraints_ok(instance: GrammarInstance, walks: np.ndarray) -> np.ndarray:
    ok = np.ones(walks.shape[0], dtype=bool)
    first_positions = []
    for constraint in instance.constraints:
        hits = gram_matches(walks, constraint.gram)
        counts = hits.sum(axis=1)
        ok &= counts >= constraint.min_count
        if constraint.max_count is not None:
            ok &= counts <= constraint.max_count
        first_positions.append(np.argmax(hits, axis=1))
    if instance.ordered:
        # Occurrences must appear in constraint order. Bounds above force
        # exactly one occurrence each, so first positions decide.
        for earlier, later in zip(first_positions, first_positions[1:]):
            ok &= earlier < later
    return ok


def _periodic(walks: np.ndarray, period: int) -> np.ndarray:
    return (walks[:, period:] == walks[:, :-period]).all(axis=1)


def _mso_accepts(instance: GrammarInstance, walks: np.ndarray) -> np.ndarray:
    # A string belongs to the mod-n language when some admissible unit
    # length tiles it a multiple-of-n number of times. Transition tables
    # shape generation only; membership is purely this counting rule.
    accept = np.zeros(walks.shape[0], dtype=bool)
    for period in PERIODS:
        if (STRING_LENGTH // period) % instance.modulus == 0:
            accept |= _periodic(walks, period)
    return accept


def _cf_accepts(instance: GrammarInstance, walks: np.ndarray) -> np.ndarray:
    table = instance.table
    if instance.cf_variant == CfVariant.ANBN:
        # Pairs (i, i + 6) must be legal; neighbours are unconstrained.
        return table.rows[walks[:, :HALF], walks[:, HALF:]].all(axis=1)
    half_legal = table.rows[walks[:, : HALF - 1], walks[:, 1:HALF]].all(axis=1)
    if instance.cf_variant == CfVariant.REPEATED:
        structural = (walks[:, HALF:] == walks[:, :HALF]).all(axis=1)
    else:
        structural = (walks[:, HALF:] == walks[:, HALF - 1 :: -1]).all(axis=1)
    return half_legal & structural


def _cs_accepts(instance: GrammarInstance, walks: np.ndarray) -> np.ndarray:
    first, second = instance.tables
    a, b, c = walks[:, :THIRD], walks[:, THIRD : 2 * THIRD], walks[:, 2 * THIRD :]
    return first.rows[a, b].all(axis=1) & second.rows[b, c].all(axis=1)


def accepts_batch(instance: GrammarInstance, walks: np.ndarray) -> np.ndarray:
    """Vector of membership verdicts for an (n, 12) array of letter indices."""
    walks = np.asarray(walks)
    if walks.ndim != 2 or walks.shape[1] != STRING_LENGTH:
        raise ValueError(f"expected shape (n, {STRING_LENGTH}), got {walks.shape}")
    level = instance.level

    if level == Level.SL and instance.k == 1:
        return np.isin(walks, instance.letter_subset).all(axis=1)
    if level == Level.SL:
        return _transitions_legal(instance.table, walks)
    if level in (Level.LT, Level.LTT, Level.LTTO):
        return _transitions_legal(instance.table, walks) & _constraints_ok(instance, walks)
    if level == Level.MSO:
        return _mso_accepts(instance, walks)
    if level == Level.CF:
        return _cf_accepts(instance, walks)
    if level == Level.CS:
        return _cs_accepts(instance, walks)
    raise ValueError(f"unhandled level {level!r}")


def oracle_accepts(instance: GrammarInstance, text: str) -> bool:
    """True iff ``text`` satisfies every rule of ``instance``.

    Raises ValueError for strings of the wrong length or with letters
    outside the instance's alphabet.
    """
    indices = check_string(text, instance.alphabet)
    return bool(accepts_batch(instance, indices[np.newaxis, :])[0])
