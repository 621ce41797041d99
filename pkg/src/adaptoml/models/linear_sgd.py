"""Stochastic gradient descent linear models: logistic loss classifier, squared-loss regressor.

Constant learning rate, optional L2 penalty (bias excluded), seeded per-epoch
shuffling in fit. partial_fit performs exactly one pass over the batch in the
given row order, which makes it the only order-sensitive incremental family.
"""

from __future__ import annotations

import numpy as np

from .base import Model


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


class SGDClassifier(Model):
    """Binary models keep one weight vector; K >= 3 trains one-vs-rest vectors."""

    def _init_weights(self, d: int):
        k = len(self.classes)
        rows = 1 if k <= 2 else k
        self.weights = np.zeros((rows, d))
        self.bias = np.zeros(rows)

    def _do_fit(self, X, y):
        self._init_weights(X.shape[1])
        rng = np.random.default_rng(self.params["seed"])
        for _ in range(self.params["epochs"]):
            for i in rng.permutation(X.shape[0]):
                self._update(X[i], int(y[i]))

    def _do_partial_fit(self, X, y):
        if not self.fitted:
            self._init_weights(X.shape[1])
        for i in range(X.shape[0]):
            self._update(X[i], int(y[i]))

    def _update(self, x: np.ndarray, label: int):
        lr = self.params["learning_rate"]
        l2 = self.params["l2"]
        idx = self.classes.index(label)
        if len(self.classes) <= 2:
            target = 1.0 if idx == 1 else -1.0
            z = float(self.weights[0] @ x + self.bias[0])
            g = -target * _sigmoid(-target * z)
            self.weights[0] -= lr * (g * x + l2 * self.weights[0])
            self.bias[0] -= lr * g
        else:
            targets = np.full(len(self.classes), -1.0)
            targets[idx] = 1.0
            z = self.weights @ x + self.bias
            g = -targets * _sigmoid(-targets * z)
            self.weights -= lr * (np.outer(g, x) + l2 * self.weights)
            self.bias -= lr * g

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights.T + self.bias

    def _do_predict(self, X):
        classes = np.asarray(self.classes, dtype=int)
        if len(self.classes) == 1:
            return np.full(X.shape[0], classes[0], dtype=int)
        if len(self.classes) == 2:
            scores = self.decision_scores(X)[:, 0]
            return np.where(scores > 0, classes[1], classes[0])  # tie at 0 -> class 0
        scores = self.decision_scores(X)
        return classes[np.argmax(scores, axis=1)]

    def _state_dict(self):
        return {"weights": self.weights.tolist(), "bias": self.bias.tolist()}

    def _restore(self, state):
        self.weights = np.asarray(state["weights"], dtype=float)
        self.bias = np.asarray(state["bias"], dtype=float)


class SGDRegressor(Model):
    def _init_weights(self, d: int):
        self.weights = np.zeros(d)
        self.bias = 0.0

    def _do_fit(self, X, y):
        self._init_weights(X.shape[1])
        rng = np.random.default_rng(self.params["seed"])
        for _ in range(self.params["epochs"]):
            for i in rng.permutation(X.shape[0]):
                self._update(X[i], float(y[i]))

    def _do_partial_fit(self, X, y):
        if not self.fitted:
            self._init_weights(X.shape[1])
        for i in range(X.shape[0]):
            self._update(X[i], float(y[i]))

    def _update(self, x: np.ndarray, target: float):
        lr = self.params["learning_rate"]
        l2 = self.params["l2"]
        residual = float(self.weights @ x + self.bias) - target
        self.weights -= lr * (residual * x + l2 * self.weights)
        self.bias -= lr * residual

    def _do_predict(self, X):
        return X @ self.weights + self.bias

    def _state_dict(self):
        return {"weights": self.weights.tolist(), "bias": float(self.bias)}

    def _restore(self, state):
        self.weights = np.asarray(state["weights"], dtype=float)
        self.bias = float(state["bias"])
