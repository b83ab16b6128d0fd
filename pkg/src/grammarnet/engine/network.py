"""Hand-written forward, loss, and backward passes for all three architectures.

Everything is float64 and batch-vectorized; recurrent nets loop over their
(at most twelve) input steps. Masked weights enter every product through
``Parameters.effective``, so a masked entry can never influence the output
and its gradient is identically zero.
"""
from __future__ import annotations

import numpy as np

from .config import NetworkConfig
from .params import Parameters

#: Probabilities are clamped to this range inside the loss.
EPSILON = 1e-12


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    ex = np.exp(x[~positive])
    out[~positive] = ex / (1.0 + ex)
    return out


def loss_bce(p, y):
    """Binary cross-entropy, elementwise; p is clamped away from 0 and 1."""
    p = np.clip(np.asarray(p, dtype=np.float64), EPSILON, 1.0 - EPSILON)
    y = np.asarray(y, dtype=np.float64)
    return -(y * np.log(p) + (1.0 - y) * np.log1p(-p))


def check_features(config: NetworkConfig, features) -> tuple[np.ndarray, bool]:
    """Normalize one example or a batch to batch form; flag single inputs."""
    X = np.asarray(features, dtype=np.float64)
    if config.architecture == "ffn":
        if X.ndim == 1:
            X, single = X[np.newaxis, :], True
        elif X.ndim == 2:
            single = False
        else:
            raise ValueError(f"ffn features must be 1- or 2-dimensional, got shape {X.shape}")
        if X.shape[1] != config.input_width:
            raise ValueError(f"expected {config.input_width} features, got {X.shape[1]}")
        return X, single
    if X.ndim == 2:
        X, single = X[np.newaxis, :, :], True
    elif X.ndim == 3:
        single = False
    else:
        raise ValueError(f"recurrent features must be 2- or 3-dimensional, got shape {X.shape}")
    if X.shape[1:] != (config.steps, config.input_width):
        raise ValueError(
            f"window {config.window} expects shape (steps={config.steps}, "
            f"features={config.input_width}), got {X.shape[1:]}"
        )
    return X, single


def _relu(x):
    return np.maximum(x, 0.0)


def _candidate(config, pre):
    if config.candidate_activation == "tanh":
        return np.tanh(pre)
    return _relu(pre)


def _forward_ffn(eff, config, X, keep):
    cache = {"inputs": [], "pre": []}
    activation = X
    for layer in range(config.depth):
        pre = activation @ eff[f"h{layer}.w"] + eff[f"h{layer}.b"]
        if keep:
            cache["inputs"].append(activation)
            cache["pre"].append(pre)
        activation = _relu(pre)
    logit = activation @ eff["readout.w"] + eff["readout.b"][0]
    cache["final"] = activation
    return logit, cache


def _forward_recurrent(eff, config, X, keep):
    batch, steps, _ = X.shape
    hidden = [np.zeros((batch, config.neurons)) for _ in range(config.depth)]
    gru = config.architecture == "gru"
    cache = {"steps": [[] for _ in range(config.depth)]}
    for t in range(steps):
        layer_input = X[:, t, :]
        for layer in range(config.depth):
            p = f"h{layer}."
            h_prev = hidden[layer]
            if gru:
                z = sigmoid(layer_input @ eff[p + "wz"] + h_prev @ eff[p + "uz"] + eff[p + "bz"])
                r = sigmoid(layer_input @ eff[p + "wr"] + h_prev @ eff[p + "ur"] + eff[p + "br"])
                cand_pre = (
                    layer_input @ eff[p + "wh"] + (r * h_prev) @ eff[p + "uh"] + eff[p + "bh"]
                )
                candidate = _candidate(config, cand_pre)
                h_new = (1.0 - z) * h_prev + z * candidate
                if keep:
                    cache["steps"][layer].append(
                        dict(inp=layer_input, h_prev=h_prev, z=z, r=r,
                             cand_pre=cand_pre, candidate=candidate)
                    )
            else:
                pre = layer_input @ eff[p + "w"] + h_prev @ eff[p + "u"] + eff[p + "b"]
                h_new = _relu(pre)
                if keep:
                    cache["steps"][layer].append(dict(inp=layer_input, h_prev=h_prev, pre=pre))
            hidden[layer] = h_new
            layer_input = h_new
    logit = hidden[-1] @ eff["readout.w"] + eff["readout.b"][0]
    cache["final"] = hidden[-1]
    return logit, cache


def _forward(params: Parameters, config: NetworkConfig, X, keep_cache):
    eff = {key: params.effective(key) for key in params.keys()}
    if config.architecture == "ffn":
        logit, cache = _forward_ffn(eff, config, X, keep_cache)
    else:
        logit, cache = _forward_recurrent(eff, config, X, keep_cache)
    return sigmoid(logit), cache, eff


def forward(params: Parameters, config: NetworkConfig, features):
    """Probability that the input string is ungrammatical.

    Accepts a single encoded example or a batch; returns a float or a
    vector accordingly. A network whose parameters are all zero outputs
    exactly 0.5.
    """
    X, single = check_features(config, features)
    prob, _, _ = _forward(params, config, X, keep_cache=False)
    return float(prob[0]) if single else prob


def _backward_ffn(eff, config, cache, d_hidden, grads):
    for layer in reversed(range(config.depth)):
        d_pre = d_hidden * (cache["pre"][layer] > 0)
        grads[f"h{layer}.w"] += cache["inputs"][layer].T @ d_pre
        grads[f"h{layer}.b"] += d_pre.sum(axis=0)
        d_hidden = d_pre @ eff[f"h{layer}.w"].T


def _backward_rnn(eff, config, cache, d_final, grads):
    steps = len(cache["steps"][0])
    batch = d_final.shape[0]
    # gradient flowing into each layer's hidden state at each step
    d_hidden_in = [
        [np.zeros_like(d_final) for _ in range(steps)] for _ in range(config.depth)
    ]
    d_hidden_in[-1][-1] = d_final
    for layer in reversed(range(config.depth)):
        p = f"h{layer}."
        w_t, u_t = eff[p + "w"].T, eff[p + "u"].T
        carry = np.zeros((batch, config.neurons))
        for t in reversed(range(steps)):
            step = cache["steps"][layer][t]
            d_h = d_hidden_in[layer][t] + carry
            d_pre = d_h * (step["pre"] > 0)
            grads[p + "w"] += step["inp"].T @ d_pre
            grads[p + "u"] += step["h_prev"].T @ d_pre
            grads[p + "b"] += d_pre.sum(axis=0)
            carry = d_pre @ u_t
            if layer > 0:
                d_hidden_in[layer - 1][t] += d_pre @ w_t


def _backward_gru(eff, config, cache, d_final, grads):
    steps = len(cache["steps"][0])
    batch = d_final.shape[0]
    d_hidden_in = [
        [np.zeros_like(d_final) for _ in range(steps)] for _ in range(config.depth)
    ]
    d_hidden_in[-1][-1] = d_final
    for layer in reversed(range(config.depth)):
        p = f"h{layer}."
        carry = np.zeros((batch, config.neurons))
        for t in reversed(range(steps)):
            step = cache["steps"][layer][t]
            z, r, h_prev = step["z"], step["r"], step["h_prev"]
            candidate = step["candidate"]
            d_h = d_hidden_in[layer][t] + carry

            d_z = d_h * (candidate - h_prev)
            d_candidate = d_h * z
            d_h_prev = d_h * (1.0 - z)

            if config.candidate_activation == "tanh":
                d_cand_pre = d_candidate * (1.0 - candidate**2)
            else:
                d_cand_pre = d_candidate * (step["cand_pre"] > 0)
            grads[p + "wh"] += step["inp"].T @ d_cand_pre
            grads[p + "uh"] += (r * h_prev).T @ d_cand_pre
            grads[p + "bh"] += d_cand_pre.sum(axis=0)
            through_uh = d_cand_pre @ eff[p + "uh"].T
            d_r = through_uh * h_prev
            d_h_prev += through_uh * r

            d_az = d_z * z * (1.0 - z)
            grads[p + "wz"] += step["inp"].T @ d_az
            grads[p + "uz"] += h_prev.T @ d_az
            grads[p + "bz"] += d_az.sum(axis=0)
            d_h_prev += d_az @ eff[p + "uz"].T

            d_ar = d_r * r * (1.0 - r)
            grads[p + "wr"] += step["inp"].T @ d_ar
            grads[p + "ur"] += h_prev.T @ d_ar
            grads[p + "br"] += d_ar.sum(axis=0)
            d_h_prev += d_ar @ eff[p + "ur"].T

            carry = d_h_prev
            if layer > 0:
                d_input = (
                    d_cand_pre @ eff[p + "wh"].T
                    + d_az @ eff[p + "wz"].T
                    + d_ar @ eff[p + "wr"].T
                )
                d_hidden_in[layer - 1][t] += d_input


def backward(params: Parameters, config: NetworkConfig, features, targets):
    """Mean-over-batch gradient of the clamped BCE loss for every parameter.

    Recurrent architectures backpropagate through all steps. Gradients at
    masked entries are exactly zero.
    """
    X, single = check_features(config, features)
    y = np.atleast_1d(np.asarray(targets, dtype=np.float64))
    if y.shape != (X.shape[0],):
        raise ValueError(f"targets shape {y.shape} does not match batch size {X.shape[0]}")
    prob, cache, eff = _forward(params, config, X, keep_cache=True)

    grads = params.zeros_like()
    d_logit = (prob - y) / X.shape[0]
    grads["readout.w"] += cache["final"].T @ d_logit
    grads["readout.b"] += np.array([d_logit.sum()])
    d_final = np.outer(d_logit, eff["readout.w"])

    if config.architecture == "ffn":
        _backward_ffn(eff, config, cache, d_final, grads)
    elif config.architecture == "rnn":
        _backward_rnn(eff, config, cache, d_final, grads)
    else:
        _backward_gru(eff, config, cache, d_final, grads)

    for key, mask in params.masks.items():
        grads[key] *= mask
    return grads
