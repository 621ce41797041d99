"""CART decision tree classifier: Gini impurity, midpoint thresholds, depth limit.

Non-incremental by design; partial_fit raises a capability error via the base
class. A node is split while it is impure and any feature still has two
distinct values, even when no candidate strictly reduces impurity — greedy
gain-only stopping cannot separate parity-style tables. Candidate ties are
broken toward the lower feature index, then the lower threshold.
"""

from __future__ import annotations

import numpy as np

from .base import Model

LEAF = -1


def gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p ** 2).sum())


class DecisionTree(Model):
    def _do_fit(self, X, y):
        k = len(self.classes)
        index = {c: i for i, c in enumerate(self.classes)}
        encoded = np.asarray([index[int(v)] for v in y], dtype=int)
        self.nodes: list[dict] = []
        self._build(X, encoded, k, depth=0)

    def _leaf(self, y: np.ndarray, k: int) -> int:
        counts = np.bincount(y, minlength=k)
        value = int(np.argmax(counts))  # majority, ties to the smallest class index
        self.nodes.append({"feature": LEAF, "threshold": 0.0, "left": -1, "right": -1, "value": value})
        return len(self.nodes) - 1

    def _build(self, X: np.ndarray, y: np.ndarray, k: int, depth: int) -> int:
        n = X.shape[0]
        pure = len(np.unique(y)) <= 1
        if (
            pure
            or depth >= self.params["max_depth"]
            or n < self.params["min_samples_split"]
        ):
            return self._leaf(y, k)
        best = self._best_split(X, y, k)
        if best is None:
            return self._leaf(y, k)
        feature, threshold = best
        mask = X[:, feature] <= threshold
        node_id = len(self.nodes)
        self.nodes.append({"feature": int(feature), "threshold": float(threshold), "left": -1, "right": -1, "value": -1})
        self.nodes[node_id]["left"] = self._build(X[mask], y[mask], k, depth + 1)
        self.nodes[node_id]["right"] = self._build(X[~mask], y[~mask], k, depth + 1)
        return node_id

    def _best_split(self, X: np.ndarray, y: np.ndarray, k: int):
        n = X.shape[0]
        best_impurity = np.inf
        best = None
        for j in range(X.shape[1]):
            order = np.argsort(X[:, j], kind="stable")
            values = X[order, j]
            labels = y[order]
            distinct_at = np.nonzero(values[:-1] != values[1:])[0]
            if distinct_at.size == 0:
                continue
            one_hot = np.zeros((n, k))
            one_hot[np.arange(n), labels] = 1.0
            cum = one_hot.cumsum(axis=0)
            total = cum[-1]
            for pos in distinct_at:
                left_counts = cum[pos]
                right_counts = total - left_counts
                n_left = pos + 1
                n_right = n - n_left
                impurity = (n_left * gini(left_counts) + n_right * gini(right_counts)) / n
                if impurity < best_impurity - 1e-15:
                    threshold = (values[pos] + values[pos + 1]) / 2.0
                    best_impurity = impurity
                    best = (j, threshold)
        return best

    def _do_predict(self, X):
        classes = np.asarray(self.classes, dtype=int)
        out = np.empty(X.shape[0], dtype=int)
        for i, x in enumerate(X):
            node = self.nodes[0]
            while node["feature"] != LEAF:
                node = self.nodes[node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]]
            out[i] = classes[node["value"]]
        return out

    def _state_dict(self):
        return {
            "nodes": [
                [n["feature"], n["threshold"], n["left"], n["right"], n["value"]]
                for n in self.nodes
            ]
        }

    def _restore(self, state):
        self.nodes = [
            {"feature": int(f), "threshold": float(t), "left": int(l), "right": int(r), "value": int(v)}
            for f, t, l, r, v in state["nodes"]
        ]
