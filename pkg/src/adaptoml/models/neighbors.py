"""k-nearest-neighbor classifier and regressor. Incremental fit is row memorization."""

from __future__ import annotations

import numpy as np

from .base import Model


class _KNNBase(Model):
    def _do_fit(self, X, y):
        self.rows = X.copy()
        self.targets = y.copy()

    def _do_partial_fit(self, X, y):
        if not self.fitted:
            self.rows = X.copy()
            self.targets = y.copy()
        else:
            self.rows = np.vstack([self.rows, X])
            self.targets = np.concatenate([self.targets, y])

    def _neighbor_indices(self, x: np.ndarray) -> np.ndarray:
        distances = np.sqrt(((self.rows - x) ** 2).sum(axis=1))
        k = min(self.params["k"], self.rows.shape[0])
        # stable sort: equal distances resolve to the lower stored-row index
        order = np.argsort(distances, kind="stable")
        return order[:k]

    def _state_dict(self):
        return {"rows": self.rows.tolist(), "targets": self.targets.tolist()}


class KNNClassifier(_KNNBase):
    def _do_predict(self, X):
        classes = np.asarray(self.classes, dtype=int)
        out = np.empty(X.shape[0], dtype=int)
        index = {c: i for i, c in enumerate(self.classes)}
        for i, x in enumerate(X):
            votes = np.zeros(len(classes), dtype=int)
            for j in self._neighbor_indices(x):
                votes[index[int(self.targets[j])]] += 1
            out[i] = classes[int(np.argmax(votes))]  # vote tie -> smallest class index
        return out

    def _restore(self, state):
        self.rows = np.asarray(state["rows"], dtype=float)
        self.targets = np.asarray(state["targets"], dtype=int)


class KNNRegressor(_KNNBase):
    def _do_predict(self, X):
        out = np.empty(X.shape[0], dtype=float)
        for i, x in enumerate(X):
            neighbors = self._neighbor_indices(x)
            out[i] = float(self.targets[neighbors].mean())
        return out

    def _restore(self, state):
        self.rows = np.asarray(state["rows"], dtype=float)
        self.targets = np.asarray(state["targets"], dtype=float)
