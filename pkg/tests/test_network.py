"""Forward pass, loss, initialization, and checkpoint behaviour."""
from __future__ import annotations

import math

import numpy as np
import pytest

from grammarnet.engine import (
    EPSILON,
    NetworkConfig,
    check_features,
    forward,
    init_network,
    load_params,
    loss_bce,
    save_params,
    sigmoid,
)
from reference_network import reference_forward

RNG = np.random.default_rng


def random_features(config, batch, rng):
    if config.architecture == "ffn":
        shape = (batch, config.input_width)
    else:
        shape = (batch, config.steps, config.input_width)
    return rng.uniform(-1.0, 1.0, size=shape)


# ---------------------------------------------------------------- config


def test_config_rejects_unknown_architecture():
    with pytest.raises(ValueError, match="architecture"):
        NetworkConfig(architecture="lstm", neurons=8)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"neurons": 0},
        {"neurons": -4},
        {"neurons": 2.5},
        {"neurons": 7, "laminations": 2},
        {"neurons": 8, "depth": 4},
        {"neurons": 8, "laminations": 3},
        {"neurons": 8, "window": 0},
        {"neurons": 8, "window": 13},
        {"neurons": 8, "candidate_activation": "gelu"},
    ],
)
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        NetworkConfig(architecture="gru", **kwargs)


def test_ffn_requires_full_window():
    with pytest.raises(ValueError, match="window"):
        NetworkConfig(architecture="ffn", neurons=8, window=3)


def test_config_shape_properties():
    gru = NetworkConfig(architecture="gru", neurons=16, window=4)
    assert gru.input_width == 24
    assert gru.steps == 9
    assert gru.recurrent

    whole = NetworkConfig(architecture="rnn", neurons=16, window=12)
    assert whole.steps == 1

    ffn = NetworkConfig(architecture="ffn", neurons=16)
    assert ffn.input_width == 72
    assert ffn.steps == 1
    assert not ffn.recurrent


# ---------------------------------------------------------- initialization


def test_init_shapes_and_zero_biases():
    config = NetworkConfig(architecture="gru", neurons=8, depth=2, window=3)
    params = init_network(config, RNG(0))
    assert params["h0.wz"].shape == (18, 8)
    assert params["h1.uh"].shape == (8, 8)
    assert params["readout.w"].shape == (8,)
    bias_keys = [key for key in params.keys() if key.split(".")[-1].startswith("b")]
    assert len(bias_keys) == 2 * 3 + 1  # three gate biases per layer plus readout
    for key in bias_keys:
        assert not params[key].any(), key


def test_parameter_count_small_ffn():
    config = NetworkConfig(architecture="ffn", neurons=4, depth=1)
    params = init_network(config, RNG(0))
    # 72*4 input weights + 4 biases + 4 readout weights + 1 readout bias
    assert params.n_parameters() == 288 + 4 + 4 + 1


def test_init_is_deterministic_and_seed_sensitive():
    config = NetworkConfig(architecture="rnn", neurons=8, depth=2, window=2)
    a = init_network(config, RNG(7))
    b = init_network(config, RNG(7))
    c = init_network(config, RNG(8))
    for key in a.keys():
        np.testing.assert_array_equal(a[key], b[key])
    assert any(not np.array_equal(a[key], c[key]) for key in a.keys())


def test_init_respects_uniform_bound():
    config = NetworkConfig(architecture="rnn", neurons=8, depth=1, window=1)
    params = init_network(config, RNG(3))
    limit_w = math.sqrt(1.0 / 6.0)
    limit_u = math.sqrt(1.0 / 8.0)
    assert np.abs(params["h0.w"]).max() < limit_w
    assert np.abs(params["h0.u"]).max() < limit_u


def test_laminated_blocks_are_disjoint():
    config = NetworkConfig(
        architecture="rnn", neurons=8, depth=2, laminations=2, window=2
    )
    params = init_network(config, RNG(5))
    for key in ("h0.u", "h1.u", "h1.w"):
        mask = params.masks[key]
        assert mask.shape == (8, 8)
        np.testing.assert_array_equal(mask[:4, :4], np.ones((4, 4)))
        np.testing.assert_array_equal(mask[4:, 4:], np.ones((4, 4)))
        assert not mask[:4, 4:].any()
        assert not mask[4:, :4].any()
        assert not params[key][~mask.astype(bool)].any()
    # the input weights of the bottom layer stay dense
    assert "h0.w" not in params.masks
    assert "readout.w" not in params.masks


def test_laminated_fanin_widens_uniform_bound():
    config = NetworkConfig(
        architecture="rnn", neurons=32, depth=1, laminations=2, window=1
    )
    laminated = init_network(config, RNG(11))
    live = laminated["h0.u"][laminated.masks["h0.u"].astype(bool)]
    # effective fan-in is 16, so draws may exceed the dense bound sqrt(1/32)
    assert np.abs(live).max() > math.sqrt(1.0 / 32.0)
    assert np.abs(live).max() < math.sqrt(1.0 / 16.0)


def test_single_lamination_equals_dense_bitwise():
    dense = NetworkConfig(architecture="gru", neurons=8, depth=2, window=3)
    lam = NetworkConfig(
        architecture="gru", neurons=8, depth=2, window=3, laminations=1
    )
    a = init_network(dense, RNG(2))
    b = init_network(lam, RNG(2))
    assert not a.masks and not b.masks
    for key in a.keys():
        np.testing.assert_array_equal(a[key], b[key])


def test_depth_one_ffn_has_no_masked_matrices():
    config = NetworkConfig(architecture="ffn", neurons=8, depth=1, laminations=2)
    params = init_network(config, RNG(0))
    assert not params.masks


# ----------------------------------------------------------------- forward


def zeroed(params):
    silenced = params.copy()
    for key in silenced.keys():
        silenced.values[key][:] = 0.0
    return silenced


def test_zero_parameters_give_exactly_half():
    for arch in ("ffn", "rnn", "gru"):
        config = NetworkConfig(architecture=arch, neurons=8, depth=2)
        params = zeroed(init_network(config, RNG(0)))
        X = random_features(config, 5, RNG(1))
        np.testing.assert_array_equal(forward(params, config, X), np.full(5, 0.5))


def test_forward_shapes_and_range():
    config = NetworkConfig(architecture="gru", neurons=8, depth=1, window=4)
    params = init_network(config, RNG(1))
    X = random_features(config, 7, RNG(2))
    probs = forward(params, config, X)
    assert probs.shape == (7,)
    assert np.all((probs > 0.0) & (probs < 1.0))
    single = forward(params, config, X[0])
    assert isinstance(single, float)
    assert single == probs[0]


@pytest.mark.parametrize("architecture", ["ffn", "rnn", "gru"])
@pytest.mark.parametrize("depth", [1, 2, 3])
@pytest.mark.parametrize("laminations", [1, 2])
def test_forward_matches_reference(architecture, depth, laminations):
    window = 12 if architecture == "ffn" else 5
    config = NetworkConfig(
        architecture=architecture,
        neurons=6,
        depth=depth,
        laminations=laminations,
        window=window,
    )
    params = init_network(config, RNG(depth * 10 + laminations))
    X = random_features(config, 4, RNG(99))
    probs = forward(params, config, X)
    for i in range(4):
        expected, _ = reference_forward(params, config, X[i])
        assert probs[i] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("window", [1, 2, 6, 11, 12])
def test_forward_matches_reference_across_windows(window):
    config = NetworkConfig(architecture="rnn", neurons=5, depth=2, window=window)
    params = init_network(config, RNG(window))
    X = random_features(config, 3, RNG(window + 100))
    probs = forward(params, config, X)
    for i in range(3):
        expected, _ = reference_forward(params, config, X[i])
        assert probs[i] == pytest.approx(expected, rel=1e-12)


def test_gru_relu_candidate_matches_reference():
    config = NetworkConfig(
        architecture="gru", neurons=6, depth=2, window=4, candidate_activation="relu"
    )
    params = init_network(config, RNG(21))
    X = random_features(config, 3, RNG(22))
    probs = forward(params, config, X)
    for i in range(3):
        expected, _ = reference_forward(params, config, X[i])
        assert probs[i] == pytest.approx(expected, rel=1e-12)


def test_check_features_rejects_bad_shapes():
    recurrent = NetworkConfig(architecture="gru", neurons=8, window=3)
    flat = NetworkConfig(architecture="ffn", neurons=8)
    with pytest.raises(ValueError):
        check_features(recurrent, np.zeros((4, 9, 18)))  # wrong step count
    with pytest.raises(ValueError):
        check_features(recurrent, np.zeros((4, 10, 12)))  # wrong width
    with pytest.raises(ValueError):
        check_features(flat, np.zeros((4, 71)))
    with pytest.raises(ValueError):
        check_features(flat, np.zeros((4, 2, 72)))
    with pytest.raises(ValueError):
        check_features(recurrent, np.zeros(18))


# -------------------------------------------------------------------- loss


def test_sigmoid_values():
    assert sigmoid(np.array(0.0)) == 0.5
    assert sigmoid(np.array(500.0)) == pytest.approx(1.0)
    assert sigmoid(np.array(-500.0)) == pytest.approx(0.0, abs=1e-100)
    x = np.linspace(-30, 30, 61)
    np.testing.assert_allclose(sigmoid(x) + sigmoid(-x), 1.0, rtol=1e-12)


def test_loss_values():
    assert loss_bce(np.array(0.5), np.array(1.0)) == pytest.approx(math.log(2.0))
    assert loss_bce(np.array(0.5), np.array(0.0)) == pytest.approx(math.log(2.0))
    assert loss_bce(np.array(0.9), np.array(1.0)) == pytest.approx(-math.log(0.9))
    assert loss_bce(np.array(0.9), np.array(0.0)) == pytest.approx(
        -math.log1p(-0.9)
    )


def test_loss_is_clamped_at_the_boundaries():
    worst = -math.log(EPSILON)
    assert loss_bce(np.array(0.0), np.array(1.0)) == pytest.approx(worst)
    assert loss_bce(np.array(1.0), np.array(0.0)) == pytest.approx(worst)
    assert np.isfinite(loss_bce(np.array([0.0, 1.0]), np.array([0.0, 1.0]))).all()


# ------------------------------------------------------------- checkpoints


@pytest.mark.parametrize("laminations", [1, 2])
def test_checkpoint_round_trip(tmp_path, laminations):
    config = NetworkConfig(
        architecture="gru", neurons=8, depth=2, window=3, laminations=laminations
    )
    params = init_network(config, RNG(13))
    path = tmp_path / "net.npz"
    save_params(path, config, params)
    loaded_config, loaded_params = load_params(path)
    assert loaded_config == config
    assert sorted(loaded_params.keys()) == sorted(params.keys())
    for key in params.keys():
        np.testing.assert_array_equal(loaded_params[key], params[key])
    assert set(loaded_params.masks) == set(params.masks)
    X = random_features(config, 3, RNG(14))
    np.testing.assert_array_equal(
        forward(params, config, X), forward(loaded_params, config, X)
    )


def test_checkpoint_rejects_foreign_files(tmp_path):
    path = tmp_path / "other.npz"
    np.savez(path, stuff=np.zeros(3))
    with pytest.raises(ValueError):
        load_params(path)


def test_checkpoint_rejects_tampered_shapes(tmp_path):
    config = NetworkConfig(architecture="rnn", neurons=4, depth=1, window=2)
    params = init_network(config, RNG(0))
    path = tmp_path / "net.npz"
    save_params(path, config, params)
    archive = dict(np.load(path, allow_pickle=False))
    archive["param:h0.u"] = np.zeros((3, 3))
    np.savez(path, **archive)
    with pytest.raises(ValueError):
        load_params(path)
