"""Scikit-learn wrapper around the network engine.

``NetworkClassifier`` composes with the string encoders in
:mod:`grammarnet.encoding`, e.g.::

    pipeline = make_pipeline(SlidingWindowEncoder(window=3),
                             NetworkClassifier(architecture="gru", window=3))

Labels are 0 (grammatical) and 1 (ungrammatical); both classes must be
present at fit time. Pass ``eval_set`` to :meth:`fit` to reproduce the
test-monitored stopping rule; without it the run is a clean fixed-epoch
fit.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .engine import NetworkConfig, check_features, forward
from .training import BATCH_SIZE, MAX_EPOCHS, optimize


class NetworkClassifier(ClassifierMixin, BaseEstimator):
    def __init__(
        self,
        architecture: str = "gru",
        neurons: int = 32,
        depth: int = 1,
        laminations: int = 1,
        window: int = 12,
        candidate_activation: str = "tanh",
        learning_rate: float = 0.01,
        momentum: float = 0.95,
        max_epochs: int = MAX_EPOCHS,
        batch_size: int = BATCH_SIZE,
        eval_stride: int = 1,
        random_state: int = 0,
    ):
        self.architecture = architecture
        self.neurons = neurons
        self.depth = depth
        self.laminations = laminations
        self.window = window
        self.candidate_activation = candidate_activation
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.max_epochs = max_epochs
        self.batch_size = batch_size
        self.eval_stride = eval_stride
        self.random_state = random_state

    def _network_config(self) -> NetworkConfig:
        return NetworkConfig(
            architecture=self.architecture,
            neurons=self.neurons,
            depth=self.depth,
            laminations=self.laminations,
            window=self.window,
            candidate_activation=self.candidate_activation,
        )

    def _validate(self, config, X):
        features, _ = check_features(config, np.asarray(X, dtype=np.float64))
        return features

    def fit(self, X, y, eval_set=None):
        config = self._network_config()
        features = self._validate(config, X)
        targets = np.asarray(y, dtype=np.float64).reshape(-1)
        if len(targets) != len(features):
            raise ValueError(
                f"X has {len(features)} rows but y has {len(targets)}"
            )
        classes = np.unique(targets)
        if not np.isin(classes, (0.0, 1.0)).all():
            raise ValueError(f"labels must be 0 or 1, got {classes}")
        if len(classes) < 2:
            raise ValueError("fit needs both classes present in y")

        testset = None
        if eval_set is not None:
            test_X, test_y = eval_set
            testset = (
                self._validate(config, test_X),
                np.asarray(test_y, dtype=np.float64).reshape(-1),
            )

        seed = int(self.random_state)
        params, epochs_run, stopped_early = optimize(
            config,
            features,
            targets,
            shuffle_seed=seed,
            init_seed=seed,
            testset=testset,
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            max_epochs=self.max_epochs,
            batch_size=self.batch_size,
            eval_stride=self.eval_stride,
        )
        self.config_ = config
        self.params_ = params
        self.classes_ = np.array([0, 1])
        self.n_epochs_ = epochs_run
        self.stopped_early_ = stopped_early
        self.n_features_in_ = int(np.prod(features.shape[1:]))
        return self

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise NotFittedError(
                "this NetworkClassifier is not fitted yet; call fit first"
            )

    def predict_proba(self, X):
        self._check_fitted()
        features = self._validate(self.config_, X)
        ungrammatical = np.atleast_1d(forward(self.params_, self.config_, features))
        return np.column_stack([1.0 - ungrammatical, ungrammatical])

    def predict(self, X):
        proba = self.predict_proba(X)
        # ties go to the ungrammatical class, matching the sweep metric
        return np.where(proba[:, 1] >= 0.5, self.classes_[1], self.classes_[0])
