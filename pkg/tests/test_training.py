"""Training loop, metrics, and the test-monitoring stop rule."""
from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from grammarnet.encoding import encode_example, split
from grammarnet.engine import NetworkConfig, init_network
from grammarnet.grammars import build_corpus, generate_instance
from grammarnet.training import (
    BATCH_SIZE,
    MAX_EPOCHS,
    OUTCOME_COLUMNS,
    TrainOutcome,
    evaluate,
    train_model,
)


def zero_net(neurons=4):
    config = NetworkConfig(architecture="ffn", neurons=neurons, depth=1)
    params = init_network(config, np.random.default_rng(0))
    for key in params.keys():
        params.values[key][:] = 0.0
    return config, params


def steered_net(logit_on, logit_off):
    """Depth-1 FFN whose logit is ``logit_on`` when feature 0 is hot, else
    ``logit_off``."""
    config, params = zero_net(neurons=1)
    params.values["h0.w"][0, 0] = 1.0
    params.values["readout.w"][0] = logit_on - logit_off
    params.values["readout.b"][0] = logit_off
    return config, params


def features_with_first_bit(bits):
    X = np.zeros((len(bits), 72))
    X[:, 0] = bits
    return X


def corpus_and_split(level="SL", k=1, per_class=50, seed=3, split_seed=17):
    instance = generate_instance(level, k, seed=seed)
    corpus = build_corpus(instance, per_class, np.random.default_rng((seed, 2)))
    return split(corpus, rng=split_seed)


# ---------------------------------------------------------------- evaluate


def test_perfect_predictor_scores_zero_and_hundred():
    # logits of +-800 saturate the sigmoid to exact 1.0 and 0.0
    config, params = steered_net(800.0, -800.0)
    X = features_with_first_bit([1.0, 0.0])
    brier, percent = evaluate(params, config, (X, np.array([1.0, 0.0])))
    assert brier == 0.0
    assert percent == 100.0


def test_constant_half_predictor():
    config, params = zero_net()
    X = np.zeros((4, 72))
    targets = np.array([1.0, 1.0, 1.0, 0.0])
    brier, percent = evaluate(params, config, (X, targets))
    assert brier == 0.25
    assert percent == 75.0  # everything is called ungrammatical


def test_pinned_brier_arithmetic():
    config, params = steered_net(math.log(9.0), math.log(0.25))
    X = features_with_first_bit([1.0, 0.0])
    brier, percent = evaluate(params, config, (X, np.array([1.0, 0.0])))
    # predictions are 0.9 and 0.2, so ((0.1)^2 + (0.2)^2) / 2
    assert brier == pytest.approx(0.025, rel=1e-12)
    assert percent == 100.0


def test_tie_counts_as_ungrammatical():
    config, params = zero_net()
    X = np.zeros((1, 72))
    assert evaluate(params, config, (X, np.array([1.0])))[1] == 100.0
    assert evaluate(params, config, (X, np.array([0.0])))[1] == 0.0


def test_evaluate_accepts_encoded_examples():
    instance = generate_instance("SL", 1, seed=0)
    corpus = build_corpus(instance, 5, np.random.default_rng(1))
    examples = [encode_example(item) for item in corpus]
    config = NetworkConfig(architecture="ffn", neurons=8, depth=1)
    params = init_network(config, np.random.default_rng(4))
    by_list = evaluate(params, config, examples)
    X = np.stack([example.features for example in examples])
    y = np.array([example.target for example in examples])
    assert by_list == evaluate(params, config, (X, y))


def test_evaluate_rejects_empty_and_garbage():
    config, params = zero_net()
    with pytest.raises(ValueError):
        evaluate(params, config, (np.zeros((0, 72)), np.zeros(0)))
    with pytest.raises(ValueError):
        evaluate(params, config, ["not", "examples"])


def test_evaluate_does_not_touch_parameters():
    config = NetworkConfig(architecture="gru", neurons=8, depth=2, window=6)
    params = init_network(config, np.random.default_rng(9))
    frozen = {key: params[key].copy() for key in params.keys()}
    X = np.random.default_rng(10).uniform(size=(5, 7, 36))
    evaluate(params, config, (X, np.array([1.0, 0.0, 1.0, 0.0, 1.0])))
    for key, value in frozen.items():
        np.testing.assert_array_equal(params[key], value)


# ------------------------------------------------------------ TrainOutcome


def outcome_kwargs(**overrides):
    base = dict(
        level="SL",
        k=1,
        instance_seed=0,
        architecture="ffn",
        neurons=32,
        depth=1,
        laminations=1,
        window=12,
        split_seed=5,
        init_seed=6,
        brier=0.125,
        percent_correct=87.5,
        epochs_run=12,
        stopped_early=False,
        wall_time=1.25,
    )
    base.update(overrides)
    return base


def test_outcome_validates_ranges():
    with pytest.raises(ValueError):
        TrainOutcome(**outcome_kwargs(brier=1.5))
    with pytest.raises(ValueError):
        TrainOutcome(**outcome_kwargs(percent_correct=-1.0))
    with pytest.raises(ValueError):
        TrainOutcome(**outcome_kwargs(epochs_run=MAX_EPOCHS + 1))


def test_outcome_csv_row_matches_columns():
    outcome = TrainOutcome(**outcome_kwargs())
    row = outcome.csv_row()
    assert len(row) == len(OUTCOME_COLUMNS)
    assert row[OUTCOME_COLUMNS.index("level")] == "SL"
    assert row[OUTCOME_COLUMNS.index("brier")] == repr(0.125)
    assert row[OUTCOME_COLUMNS.index("stopped_early")] == "False"
    assert float(row[OUTCOME_COLUMNS.index("wall_time")]) == 1.25


def test_outcome_rebuilds_its_config():
    outcome = TrainOutcome(**outcome_kwargs(architecture="gru", window=4))
    config = outcome.config
    assert config.architecture == "gru"
    assert config.window == 4
    assert config.neurons == 32


# ------------------------------------------------------------- train_model


def test_easy_letter_grammar_is_learned():
    data = corpus_and_split()
    config = NetworkConfig(architecture="ffn", neurons=64, depth=1)
    outcome, params = train_model(config, data, init_seed=21)
    assert outcome.percent_correct >= 95.0
    assert outcome.epochs_run <= MAX_EPOCHS
    assert outcome.level == "SL" and outcome.k == 1
    assert outcome.split_seed == 17 and outcome.init_seed == 21
    assert outcome.wall_time > 0.0
    # the returned parameters reproduce the reported metrics
    window = None
    from grammarnet.encoding import encode_corpus

    testset = encode_corpus(data.test, window=window)
    assert evaluate(params, config, testset) == (
        outcome.brier,
        outcome.percent_correct,
    )


def test_early_stop_reports_perfect_test_score():
    data = corpus_and_split(per_class=150)  # 240 training strings, 3 batches
    config = NetworkConfig(architecture="ffn", neurons=64, depth=1)
    outcome, _ = train_model(config, data, init_seed=2)
    assert outcome.stopped_early
    assert outcome.percent_correct == 100.0


def test_monitoring_disabled_runs_every_epoch():
    data = corpus_and_split(per_class=20)
    config = NetworkConfig(architecture="ffn", neurons=32, depth=1)
    outcome, _ = train_model(
        config, data, init_seed=2, max_epochs=3, monitor_test=False
    )
    assert outcome.epochs_run == 3
    assert not outcome.stopped_early


def test_wide_eval_stride_skips_monitoring():
    data = corpus_and_split(per_class=20)
    config = NetworkConfig(architecture="ffn", neurons=32, depth=1)
    outcome, _ = train_model(
        config, data, init_seed=2, max_epochs=3, eval_stride=10_000
    )
    assert outcome.epochs_run == 3
    assert not outcome.stopped_early


def test_training_is_deterministic():
    data = corpus_and_split(level="LT", k=2, per_class=30, seed=5, split_seed=7)
    config = NetworkConfig(architecture="gru", neurons=8, depth=1, window=6)
    first, params_a = train_model(config, data, init_seed=13, max_epochs=3)
    second, params_b = train_model(config, data, init_seed=13, max_epochs=3)
    assert dataclasses.replace(first, wall_time=0.0) == dataclasses.replace(
        second, wall_time=0.0
    )
    for key in params_a.keys():
        np.testing.assert_array_equal(params_a[key], params_b[key])


def test_init_seed_changes_the_run():
    data = corpus_and_split(level="LT", k=2, per_class=30, seed=5, split_seed=7)
    config = NetworkConfig(architecture="gru", neurons=8, depth=1, window=6)
    first, _ = train_model(config, data, init_seed=1, max_epochs=2)
    second, _ = train_model(config, data, init_seed=2, max_epochs=2)
    assert first.brier != second.brier


def test_recurrent_batching_uses_batch_constant():
    assert BATCH_SIZE == 100
    assert MAX_EPOCHS == 100


def test_bad_eval_stride_rejected():
    data = corpus_and_split(per_class=5)
    config = NetworkConfig(architecture="ffn", neurons=8, depth=1)
    with pytest.raises(ValueError):
        train_model(config, data, init_seed=0, eval_stride=0)


def test_split_without_seed_is_rejected():
    instance = generate_instance("SL", 1, seed=3)
    corpus = build_corpus(instance, 10, np.random.default_rng(0))
    data = split(corpus, rng=np.random.default_rng(5))
    config = NetworkConfig(architecture="ffn", neurons=8, depth=1)
    with pytest.raises(ValueError, match="seed"):
        train_model(config, data, init_seed=0)
