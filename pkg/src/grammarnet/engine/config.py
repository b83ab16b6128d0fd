"""Network shape and hyperparameter container."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..alphabet import ALPHABET_SIZE, STRING_LENGTH
from ..encoding import FULL_WIDTH

ARCHITECTURES = ("ffn", "rnn", "gru")
CANDIDATE_ACTIVATIONS = ("tanh", "relu")


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture plus every shape decision the engine needs.

    ``neurons`` is the width of each hidden layer; ``laminations`` splits
    every hidden layer into that many equal channels that never exchange
    information until the final read-out. ``window`` is the sliding input
    width for recurrent nets; feed-forward nets always see the whole
    string, so their window is pinned at 12. ``candidate_activation``
    selects the GRU candidate nonlinearity (sensitivity switch; tanh is
    the default used everywhere).
    """

    architecture: str
    neurons: int
    depth: int = 1
    laminations: int = 1
    window: int = 12
    candidate_activation: str = "tanh"

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"architecture must be one of {ARCHITECTURES}, got {self.architecture!r}")
        if not isinstance(self.neurons, (int, np.integer)) or self.neurons < 1:
            raise ValueError(f"neurons must be a positive integer, got {self.neurons!r}")
        if self.depth not in (1, 2, 3):
            raise ValueError(f"depth must be 1, 2 or 3, got {self.depth!r}")
        if self.laminations not in (1, 2):
            raise ValueError(f"laminations must be 1 or 2, got {self.laminations!r}")
        if self.neurons % self.laminations:
            raise ValueError(
                f"neurons ({self.neurons}) must divide evenly into {self.laminations} laminations"
            )
        if not isinstance(self.window, (int, np.integer)) or not 1 <= self.window <= STRING_LENGTH:
            raise ValueError(f"window must be an integer in 1..{STRING_LENGTH}, got {self.window!r}")
        if self.architecture == "ffn" and self.window != STRING_LENGTH:
            raise ValueError("feed-forward networks read the whole string; window must be 12")
        if self.candidate_activation not in CANDIDATE_ACTIVATIONS:
            raise ValueError(
                f"candidate_activation must be one of {CANDIDATE_ACTIVATIONS}, "
                f"got {self.candidate_activation!r}"
            )

    @property
    def recurrent(self) -> bool:
        return self.architecture in ("rnn", "gru")

    @property
    def input_width(self) -> int:
        """Features per step: 72 flat for ffn, 6 * window per step otherwise."""
        if self.architecture == "ffn":
            return FULL_WIDTH
        return ALPHABET_SIZE * self.window

    @property
    def steps(self) -> int:
        """Input steps consumed per string (1 for ffn and for window 12)."""
        if self.architecture == "ffn":
            return 1
        return STRING_LENGTH - self.window + 1
