"""One training job: batching, epoch loop, test monitoring, final metrics.

The protocol is momentum SGD on batches of 100 for at most 100 epochs.
After every batch the test set is scored and training stops the moment
test accuracy reaches 100 percent. That monitoring loop leaks test
information into the stopping decision by construction; pass
``monitor_test=False`` for a clean fixed-epoch run, or raise
``eval_stride`` to check the test set less often in large sweeps.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .encoding import EncodedExample, SplitCorpus, encode_corpus
from .grammars import Level
from .engine import (
    NetworkConfig,
    Parameters,
    backward,
    forward,
    init_network,
    init_optimizer,
    momentum_step,
)

MAX_EPOCHS = 100
BATCH_SIZE = 100

OUTCOME_COLUMNS = (
    "level",
    "k",
    "instance_seed",
    "architecture",
    "neurons",
    "depth",
    "laminations",
    "window",
    "split_seed",
    "init_seed",
    "brier",
    "percent_correct",
    "epochs_run",
    "stopped_early",
    "wall_time",
)


@dataclass(frozen=True)
class TrainOutcome:
    """Result of a single training job, one CSV row per instance.

    ``brier`` and ``percent_correct`` are test-split metrics. ``wall_time``
    is in seconds and is the only field that varies between otherwise
    identical runs; comparisons for reproducibility should drop it.
    """

    level: str
    k: int
    instance_seed: int
    architecture: str
    neurons: int
    depth: int
    laminations: int
    window: int
    split_seed: int
    init_seed: int
    brier: float
    percent_correct: float
    epochs_run: int
    stopped_early: bool
    wall_time: float
    candidate_activation: str = "tanh"

    def __post_init__(self) -> None:
        if not 0.0 <= self.brier <= 1.0:
            raise ValueError(f"brier out of range: {self.brier}")
        if not 0.0 <= self.percent_correct <= 100.0:
            raise ValueError(f"percent_correct out of range: {self.percent_correct}")
        if self.epochs_run > MAX_EPOCHS:
            raise ValueError(f"epochs_run exceeds {MAX_EPOCHS}: {self.epochs_run}")

    @property
    def config(self) -> NetworkConfig:
        return NetworkConfig(
            architecture=self.architecture,
            neurons=self.neurons,
            depth=self.depth,
            laminations=self.laminations,
            window=self.window,
            candidate_activation=self.candidate_activation,
        )

    def csv_row(self) -> list[str]:
        """Serialized values in ``OUTCOME_COLUMNS`` order."""
        row = []
        for column in OUTCOME_COLUMNS:
            value = getattr(self, column)
            row.append(repr(value) if isinstance(value, float) else str(value))
        return row


def _as_arrays(testset) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(testset, tuple) and len(testset) == 2:
        features, targets = testset
        return np.asarray(features, dtype=np.float64), np.asarray(
            targets, dtype=np.float64
        )
    examples = list(testset)
    if examples and isinstance(examples[0], EncodedExample):
        features = np.stack([example.features for example in examples])
        targets = np.array([example.target for example in examples])
        return features, targets
    raise ValueError(
        "expected a (features, targets) pair or a sequence of EncodedExample"
    )


def evaluate(params: Parameters, config: NetworkConfig, testset):
    """(brier, percent_correct) on a test set; never mutates ``params``.

    A prediction at or above 0.5 counts as an ungrammatical call, so an
    exactly undecided network classifies everything as ungrammatical.
    """
    features, targets = _as_arrays(testset)
    if len(targets) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    probs = np.atleast_1d(forward(params, config, features))
    brier = float(np.mean((probs - targets) ** 2))
    called_ungrammatical = probs >= 0.5
    actual_ungrammatical = targets >= 0.5
    percent = float(np.mean(called_ungrammatical == actual_ungrammatical) * 100.0)
    return brier, percent


def optimize(
    config: NetworkConfig,
    train_features: np.ndarray,
    train_targets: np.ndarray,
    *,
    shuffle_seed: int,
    init_seed: int,
    testset=None,
    learning_rate: float = 0.01,
    momentum: float = 0.95,
    max_epochs: int = MAX_EPOCHS,
    batch_size: int = BATCH_SIZE,
    eval_stride: int = 1,
) -> tuple[Parameters, int, bool]:
    """The bare optimization loop shared by ``train_model`` and the
    estimator wrapper. Returns (params, epochs_run, stopped_early).

    When ``testset`` is given it is scored after every ``eval_stride``-th
    batch and training stops at 100 percent test accuracy.
    """
    if eval_stride < 1:
        raise ValueError(f"eval_stride must be positive, got {eval_stride}")
    params = init_network(config, np.random.default_rng(init_seed))
    state = init_optimizer(params, learning_rate, momentum)

    epochs_run = 0
    stopped_early = False
    batches_seen = 0
    for epoch in range(max_epochs):
        epochs_run = epoch + 1
        shuffle = np.random.default_rng([shuffle_seed, epoch])
        order = shuffle.permutation(len(train_targets))
        for lo in range(0, len(order), batch_size):
            batch = order[lo : lo + batch_size]
            grads = backward(params, config, train_features[batch], train_targets[batch])
            momentum_step(params, grads, state)
            batches_seen += 1
            if testset is not None and batches_seen % eval_stride == 0:
                _, percent = evaluate(params, config, testset)
                if percent == 100.0:
                    stopped_early = True
                    break
        if stopped_early:
            break
    return params, epochs_run, stopped_early


def train_model(
    config: NetworkConfig,
    data: SplitCorpus,
    *,
    init_seed: int,
    learning_rate: float = 0.01,
    momentum: float = 0.95,
    max_epochs: int = MAX_EPOCHS,
    batch_size: int = BATCH_SIZE,
    eval_stride: int = 1,
    monitor_test: bool = True,
) -> tuple[TrainOutcome, Parameters]:
    """Train one network on one split corpus and score it.

    The grammar descriptor is read off the corpus itself. Epoch shuffles
    derive from ``(split_seed, epoch)`` and initialization from
    ``init_seed``, so a given (config, corpus, seeds) triple reproduces
    bit-identical metrics; only ``wall_time`` varies.
    """
    if data.split_seed is None:
        raise ValueError(
            "training needs a corpus split with an integer seed; "
            "pass split(corpus, rng=<int>) so epoch shuffles are reproducible"
        )
    window = None if config.architecture == "ffn" else config.window
    train_features, train_targets = encode_corpus(data.train, window=window)
    test_features, test_targets = encode_corpus(data.test, window=window)
    testset = (test_features, test_targets)

    start = time.perf_counter()
    params, epochs_run, stopped_early = optimize(
        config,
        train_features,
        train_targets,
        shuffle_seed=data.split_seed,
        init_seed=init_seed,
        testset=testset if monitor_test else None,
        learning_rate=learning_rate,
        momentum=momentum,
        max_epochs=max_epochs,
        batch_size=batch_size,
        eval_stride=eval_stride,
    )

    brier, percent = evaluate(params, config, testset)
    wall_time = time.perf_counter() - start

    anchor = data.train[0]
    outcome = TrainOutcome(
        level=Level(anchor.level).value,
        k=int(anchor.k),
        instance_seed=int(anchor.instance_seed),
        architecture=config.architecture,
        neurons=config.neurons,
        depth=config.depth,
        laminations=config.laminations,
        window=config.window,
        split_seed=data.split_seed,
        init_seed=int(init_seed),
        brier=brier,
        percent_correct=percent,
        epochs_run=epochs_run,
        stopped_early=stopped_early,
        wall_time=wall_time,
        candidate_activation=config.candidate_activation,
    )
    return outcome, params
