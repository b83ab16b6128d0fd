"""Grammaticality classification over a grammar hierarchy with small networks.

The package splits into a grammar core (:mod:`grammarnet.grammars`),
string encodings (:mod:`grammarnet.encoding`), a numpy network engine
(:mod:`grammarnet.engine`), the training harness
(:mod:`grammarnet.training`), grid sweeps (:mod:`grammarnet.sweep`),
and results analysis (:mod:`grammarnet.analysis`). The most commonly
used names are re-exported here.
"""

__version__ = "0.1.0"

from .analysis import SummaryTable, aggregate, analyze, bootstrap_interval, emit_plots
from .encoding import (
    EncodedExample,
    FullStringEncoder,
    SlidingWindowEncoder,
    SplitCorpus,
    encode_corpus,
    encode_example,
    split,
    target_of,
)
from .engine import (
    NetworkConfig,
    Parameters,
    backward,
    forward,
    init_network,
    load_params,
    save_params,
)
from .estimator import NetworkClassifier
from .grammars import (
    GenerationError,
    GrammarInstance,
    Label,
    LabeledString,
    Level,
    build_corpus,
    feasible_instance,
    generate_instance,
    oracle_accepts,
    read_corpus,
    sample_string,
    write_corpus,
)
from .sweep import JobSpec, SweepGrid, enumerate_grid, run_job, run_sweep
from .training import TrainOutcome, evaluate, train_model

__all__ = [
    "EncodedExample",
    "FullStringEncoder",
    "GenerationError",
    "GrammarInstance",
    "JobSpec",
    "Label",
    "LabeledString",
    "Level",
    "NetworkClassifier",
    "NetworkConfig",
    "Parameters",
    "SlidingWindowEncoder",
    "SplitCorpus",
    "SummaryTable",
    "SweepGrid",
    "TrainOutcome",
    "__version__",
    "aggregate",
    "analyze",
    "backward",
    "bootstrap_interval",
    "build_corpus",
    "emit_plots",
    "encode_corpus",
    "encode_example",
    "enumerate_grid",
    "evaluate",
    "feasible_instance",
    "forward",
    "generate_instance",
    "init_network",
    "load_params",
    "oracle_accepts",
    "read_corpus",
    "run_job",
    "run_sweep",
    "sample_string",
    "save_params",
    "split",
    "target_of",
    "train_model",
    "write_corpus",
]
