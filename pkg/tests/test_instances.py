import numpy as np
import pytest

from grammarnet.grammars import (
    CfVariant,
    Level,
    OUT_DEGREE,
    VALID_K,
    generate_instance,
)
from reference_grammars import LEVEL_KS


def test_sl1_picks_half_the_letters():
    instance = generate_instance("SL", 1, seed=4)
    assert instance.letter_subset is not None
    assert len(instance.letter_subset) == 3
    assert len(set(instance.letter_subset)) == 3
    assert all(0 <= i < 6 for i in instance.letter_subset)
    assert instance.tables == ()


@pytest.mark.parametrize("k,contexts", [(2, 6), (3, 36)])
def test_sl_tables_have_one_row_per_context(k, contexts):
    instance = generate_instance("SL", k, seed=9)
    assert instance.table.rows.shape == (contexts, 6)
    assert instance.table.out_degree == 3


@pytest.mark.parametrize("level", ["LT", "LTT", "LTTO"])
@pytest.mark.parametrize("k", [2, 3])
def test_constraint_levels_sample_two_legal_kgrams(level, k):
    instance = generate_instance(level, k, seed=21)
    assert len(instance.constraints) == 2
    grams = [c.gram for c in instance.constraints]
    assert grams[0] != grams[1]
    for constraint in instance.constraints:
        assert len(constraint.gram) == k
        # the required k-gram is itself legal under the instance table
        *context, last = constraint.gram
        row = context[0] if len(context) == 1 else context[0] * 6 + context[1]
        assert instance.table.allows(row, last)
        assert constraint.min_count == 1
        expected_max = None if level == "LT" else 1
        assert constraint.max_count == expected_max
    assert instance.ordered == (level == "LTTO")


@pytest.mark.parametrize("level,expected", sorted(OUT_DEGREE.items(), key=lambda kv: kv[0].value))
def test_out_degree_per_level(level, expected):
    k = VALID_K[level][-1]
    instance = generate_instance(level, k or None, seed=2)
    if instance.tables:
        assert all(table.out_degree == expected for table in instance.tables)


def test_mso_modulus_sampled_and_pinnable():
    seen = {generate_instance("MSO", 2, seed=s).modulus for s in range(12)}
    assert seen == {2, 3}
    assert generate_instance("MSO", 3, seed=0, modulus=3).modulus == 3
    with pytest.raises(ValueError, match="modulus"):
        generate_instance("MSO", 2, seed=0, modulus=5)


def test_cf_variant_sampled_and_pinnable():
    seen = {generate_instance("CF", seed=s).cf_variant for s in range(24)}
    assert seen == set(CfVariant)
    pinned = generate_instance("CF", seed=0, cf_variant="mirrored")
    assert pinned.cf_variant == CfVariant.MIRRORED


def test_cs_has_two_chained_tables():
    instance = generate_instance("CS", seed=13)
    assert len(instance.tables) == 2
    assert not instance.tables[0].equals(instance.tables[1])


@pytest.mark.parametrize("level,k", LEVEL_KS)
def test_instances_are_seed_deterministic(level, k):
    a = generate_instance(level, k, seed=37)
    b = generate_instance(level, k, seed=37)
    assert a.level == b.level and a.k == b.k and a.seed == b.seed
    assert len(a.tables) == len(b.tables)
    for ta, tb in zip(a.tables, b.tables):
        assert ta.equals(tb)
    assert a.letter_subset == b.letter_subset
    assert a.constraints == b.constraints
    assert a.modulus == b.modulus
    assert a.cf_variant == b.cf_variant


@pytest.mark.parametrize(
    "level,k",
    [("SL", 0), ("SL", 4), ("LT", 1), ("LTT", 4), ("LTTO", 1), ("MSO", 1), ("CF", 2), ("CS", 3)],
)
def test_invalid_level_k_combinations(level, k):
    with pytest.raises(ValueError):
        generate_instance(level, k, seed=0)


def test_unknown_level_rejected():
    with pytest.raises(ValueError, match="unknown level"):
        generate_instance("XXL", 2, seed=0)


def test_level_accepts_lowercase_names():
    assert generate_instance("sl", 2, seed=0).level == Level.SL
