"""Grammar hierarchy: transition tables, instances, oracles, samplers."""

from .corpus_io import read_corpus, write_corpus
from .instances import (
    Constraint,
    CfVariant,
    GrammarInstance,
    Level,
    MODULI,
    OUT_DEGREE,
    PERIODS,
    VALID_K,
    generate_instance,
    normalize_level,
)
from .oracles import accepts_batch, gram_matches, oracle_accepts
from .sampling import (
    FEASIBILITY_RETRIES,
    GenerationError,
    Label,
    LabeledString,
    REJECTION_BUDGET,
    build_corpus,
    feasible_instance,
    sample_string,
)
from .tables import TransitionTable, build_transition_table

__all__ = [
    "Constraint",
    "CfVariant",
    "FEASIBILITY_RETRIES",
    "GenerationError",
    "GrammarInstance",
    "Label",
    "LabeledString",
    "Level",
    "MODULI",
    "OUT_DEGREE",
    "PERIODS",
    "REJECTION_BUDGET",
    "TransitionTable",
    "VALID_K",
    "accepts_batch",
    "build_corpus",
    "build_transition_table",
    "feasible_instance",
    "generate_instance",
    "gram_matches",
    "normalize_level",
    "oracle_accepts",
    "read_corpus",
    "sample_string",
    "write_corpus",
]
