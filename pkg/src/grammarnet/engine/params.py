"""Parameter containers, seeded initialization, lamination masks, checkpoints.

Checkpoint layout (``grammarnet-params-v1``, a numpy ``.npz`` archive):

* ``format``: the literal format tag above.
* ``config``: JSON object with the NetworkConfig fields.
* ``param:<name>``: one float64 array per parameter, in layer order.

Parameter names are ``h<l>.<piece>`` for hidden layer ``l`` (pieces ``w``,
``u``, ``b`` for plain layers; ``wz uz bz wr ur br wh uh bh`` for GRU
layers) and ``readout.w`` / ``readout.b``. Masks are not stored; they are a
pure function of the config and are rebuilt on load.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import NetworkConfig

FORMAT_TAG = "grammarnet-params-v1"

GRU_PIECES = ("wz", "uz", "bz", "wr", "ur", "br", "wh", "uh", "bh")


@dataclass
class Parameters:
    """Named float64 arrays plus the 0/1 masks of structurally absent weights.

    ``values`` keeps insertion order (hidden layers bottom-up, then the
    read-out); every array in ``masks`` shares its key's shape. Mask zeros
    must stay zero: :meth:`project` re-applies them after any update.
    """

    values: dict[str, np.ndarray]
    masks: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, key: str) -> np.ndarray:
        return self.values[key]

    def keys(self):
        return self.values.keys()

    def effective(self, key: str) -> np.ndarray:
        """The array as the forward pass sees it, masked entries zeroed."""
        if key in self.masks:
            return self.values[key] * self.masks[key]
        return self.values[key]

    def project(self) -> None:
        for key, mask in self.masks.items():
            self.values[key] *= mask

    def copy(self) -> "Parameters":
        return Parameters(
            {k: v.copy() for k, v in self.values.items()},
            {k: m.copy() for k, m in self.masks.items()},
        )

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.values.items()}

    def n_parameters(self) -> int:
        """Free parameters: masked entries do not count."""
        total = 0
        for key, value in self.values.items():
            if key in self.masks:
                total += int(self.masks[key].sum())
            else:
                total += value.size
        return total


def _block_mask(n_in: int, n_out: int, laminations: int) -> np.ndarray:
    """Block-diagonal 0/1 mask keeping each lamination channel separate."""
    mask = np.zeros((n_in, n_out), dtype=np.float64)
    in_c, out_c = n_in // laminations, n_out // laminations
    for c in range(laminations):
        mask[c * in_c : (c + 1) * in_c, c * out_c : (c + 1) * out_c] = 1.0
    return mask


def _layer_pieces(config: NetworkConfig, layer: int) -> list[tuple[str, str]]:
    """(name, kind) pairs for one hidden layer; kind is w, u or b."""
    prefix = f"h{layer}."
    if config.architecture == "ffn":
        pieces = [("w", "w"), ("b", "b")]
    elif config.architecture == "rnn":
        pieces = [("w", "w"), ("u", "u"), ("b", "b")]
    else:
        pieces = [(name, name[0]) for name in GRU_PIECES]
    return [(prefix + name, kind) for name, kind in pieces]


def init_network(config: NetworkConfig, rng) -> Parameters:
    """Seeded uniform initialization, masks applied.

    Weights are uniform in ``[-sqrt(1/fan_in), +sqrt(1/fan_in)]`` where
    fan-in counts only a unit's unmasked inputs; biases start at zero.
    The number and order of random draws depend only on the config's
    shapes, never on the masks, so results are seed-stable by design.
    """
    rng = np.random.default_rng(rng)
    values: dict[str, np.ndarray] = {}
    masks: dict[str, np.ndarray] = {}
    n = config.neurons
    lam = config.laminations

    for layer in range(config.depth):
        n_in = config.input_width if layer == 0 else n
        for key, kind in _layer_pieces(config, layer):
            if kind == "b":
                values[key] = np.zeros(n, dtype=np.float64)
                continue
            if kind == "u":
                shape, masked = (n, n), lam > 1
            else:  # input weights: only the raw input feeds all channels
                shape, masked = (n_in, n), lam > 1 and layer > 0
            fan_in = shape[0] // lam if masked else shape[0]
            limit = np.sqrt(1.0 / fan_in)
            values[key] = rng.uniform(-limit, limit, shape)
            if masked:
                masks[key] = _block_mask(*shape, lam)

    # read-out recombines every channel, so it is never masked
    limit = np.sqrt(1.0 / n)
    values["readout.w"] = rng.uniform(-limit, limit, n)
    values["readout.b"] = np.zeros(1, dtype=np.float64)

    params = Parameters(values, masks)
    params.project()
    return params


def save_params(path, config: NetworkConfig, params: Parameters) -> None:
    """Write a self-describing checkpoint (see module docstring for layout)."""
    payload = {
        "format": np.array(FORMAT_TAG),
        "config": np.array(json.dumps(vars(config) | {"__dataclass__": "NetworkConfig"})),
    }
    for key, value in params.values.items():
        payload[f"param:{key}"] = value
    np.savez(Path(path), **payload)


def load_params(path) -> tuple[NetworkConfig, Parameters]:
    """Read a checkpoint back into a config and masked parameters."""
    with np.load(Path(path), allow_pickle=False) as archive:
        if "format" not in archive or str(archive["format"]) != FORMAT_TAG:
            raise ValueError(f"{path} is not a {FORMAT_TAG} checkpoint")
        blob = json.loads(str(archive["config"]))
        blob.pop("__dataclass__", None)
        config = NetworkConfig(**blob)
        reference = init_network(config, rng=0)
        values = {}
        for key, expected in reference.values.items():
            name = f"param:{key}"
            if name not in archive.files or archive[name].shape != expected.shape:
                raise ValueError(f"{path}: checkpoint does not match its config at {key!r}")
            values[key] = archive[name].astype(np.float64)
        params = Parameters(values, reference.masks)
    params.project()
    return config, params
