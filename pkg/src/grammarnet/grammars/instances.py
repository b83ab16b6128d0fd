"""Grammar levels and seeded construction of concrete grammar instances."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..alphabet import ALPHABET_SIZE, DEFAULT_ALPHABET, Alphabet
from .tables import TransitionTable, build_transition_table


class Level(str, Enum):
    """Grammar families, ordered from least to most expressive."""

    SL = "SL"      # strictly local: every k-gram must be legal
    LT = "LT"      # locally testable: SL plus required k-grams
    LTT = "LTT"    # threshold testable: required k-grams appear exactly once
    LTTO = "LTTO"  # threshold testable with a required occurrence order
    MSO = "MSO"    # modular counting of repeated units
    CF = "CF"      # repeated / mirrored halves, or cross-half pairs
    CS = "CS"      # chained cross-thirds dependencies


class CfVariant(str, Enum):
    REPEATED = "repeated"
    MIRRORED = "mirrored"
    ANBN = "anbn"


#: k values each level accepts (0 marks levels where k does not apply).
VALID_K = {
    Level.SL: (1, 2, 3),
    Level.LT: (2, 3),
    Level.LTT: (2, 3),
    Level.LTTO: (2, 3),
    Level.MSO: (2, 3),
    Level.CF: (0,),
    Level.CS: (0,),
}

#: Transition-table out-degree per level.
OUT_DEGREE = {
    Level.SL: 3,
    Level.LT: 3,
    Level.LTT: 3,
    Level.LTTO: 5,
    Level.MSO: 5,
    Level.CF: 3,
    Level.CS: 3,
}

MODULI = (2, 3)

#: Unit lengths that tile a 12-letter string, excluding the trivial 1 and 12.
PERIODS = (2, 3, 4, 6)


@dataclass(frozen=True)
class Constraint:
    """A k-gram that must occur between min_count and max_count times.

    ``gram`` holds letter indices. ``max_count=None`` means unbounded.
    """

    gram: tuple[int, ...]
    min_count: int = 1
    max_count: int | None = None


@dataclass(frozen=True, eq=False)
class GrammarInstance:
    """One concrete grammar: a level plus everything sampled for it.

    Only the fields a level uses are populated; the rest keep their
    defaults. ``seed`` is the instance seed the grammar was drawn from.
    """

    level: Level
    k: int
    seed: int
    alphabet: Alphabet = DEFAULT_ALPHABET
    tables: tuple[TransitionTable, ...] = ()
    letter_subset: tuple[int, ...] | None = None
    constraints: tuple[Constraint, ...] = ()
    ordered: bool = False
    modulus: int | None = None
    cf_variant: CfVariant | None = None

    @property
    def table(self) -> TransitionTable:
        """The single transition table, for levels that carry exactly one."""
        if len(self.tables) != 1:
            raise ValueError(f"instance has {len(self.tables)} tables, not one")
        return self.tables[0]

    def describe(self) -> str:
        bits = [f"level={self.level.value}", f"k={self.k}", f"seed={self.seed}"]
        if self.modulus is not None:
            bits.append(f"modulus={self.modulus}")
        if self.cf_variant is not None:
            bits.append(f"variant={self.cf_variant.value}")
        return " ".join(bits)


def normalize_level(level) -> Level:
    if isinstance(level, Level):
        return level
    try:
        return Level(str(level).upper())
    except ValueError:
        raise ValueError(
            f"unknown level {level!r}; expected one of {[lv.value for lv in Level]}"
        ) from None


def _check_k(level: Level, k) -> int:
    if level in (Level.CF, Level.CS):
        if k in (None, 0):
            return 0
        raise ValueError(f"k does not apply to level {level.value}, got {k}")
    if k not in VALID_K[level]:
        raise ValueError(f"level {level.value} requires k in {VALID_K[level]}, got {k}")
    return int(k)


def _sample_constraints(table: TransitionTable, k: int, rng, max_count) -> tuple[Constraint, ...]:
    # Constraints are drawn without replacement from the k-grams the table
    # itself permits, so a required k-gram is always reachable in principle.
    contexts, letters = np.nonzero(table.rows)
    picks = rng.choice(len(contexts), size=2, replace=False)
    grams = []
    for i in picks:
        ctx, letter = int(contexts[i]), int(letters[i])
        if k == 2:
            grams.append((ctx, letter))
        else:
            grams.append((ctx // ALPHABET_SIZE, ctx % ALPHABET_SIZE, letter))
    return tuple(Constraint(gram, 1, max_count) for gram in grams)


def generate_instance(
    level,
    k: int | None = None,
    seed: int = 0,
    *,
    modulus: int | None = None,
    cf_variant: CfVariant | str | None = None,
    alphabet: Alphabet = DEFAULT_ALPHABET,
) -> GrammarInstance:
    """Draw a grammar instance for ``level`` from an integer seed.

    The same (level, k, seed) triple always produces a byte-identical
    instance. ``modulus`` (MSO) and ``cf_variant`` (CF) are normally sampled
    from the seed but can be pinned explicitly.
    """
    level = normalize_level(level)
    k = _check_k(level, k)
    seed = int(seed)
    rng = np.random.default_rng(seed)
    common = dict(level=level, k=k, seed=seed, alphabet=alphabet)

    if level == Level.SL and k == 1:
        subset = tuple(sorted(int(i) for i in rng.choice(ALPHABET_SIZE, size=3, replace=False)))
        return GrammarInstance(letter_subset=subset, **common)

    if level in (Level.SL, Level.LT, Level.LTT, Level.LTTO, Level.MSO):
        table = build_transition_table(k - 1, OUT_DEGREE[level], rng)
        if level == Level.SL:
            return GrammarInstance(tables=(table,), **common)
        if level == Level.LT:
            constraints = _sample_constraints(table, k, rng, max_count=None)
            return GrammarInstance(tables=(table,), constraints=constraints, **common)
        if level in (Level.LTT, Level.LTTO):
            constraints = _sample_constraints(table, k, rng, max_count=1)
            return GrammarInstance(
                tables=(table,),
                constraints=constraints,
                ordered=level == Level.LTTO,
                **common,
            )
        if modulus is None:
            modulus = int(rng.choice(MODULI))
        elif modulus not in MODULI:
            raise ValueError(f"modulus must be one of {MODULI}, got {modulus}")
        return GrammarInstance(tables=(table,), modulus=modulus, **common)

    if level == Level.CF:
        table = build_transition_table(1, OUT_DEGREE[level], rng)
        if cf_variant is None:
            variants = list(CfVariant)
            cf_variant = variants[int(rng.integers(len(variants)))]
        else:
            cf_variant = CfVariant(cf_variant)
        return GrammarInstance(tables=(table,), cf_variant=cf_variant, **common)

    # CS: two chained tables, first half -> middle, middle -> last.
    first = build_transition_table(1, OUT_DEGREE[level], rng)
    second = build_transition_table(1, OUT_DEGREE[level], rng)
    return GrammarInstance(tables=(first, second), **common)
