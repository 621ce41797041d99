"""Gaussian naive Bayes with exact streaming (Chan merge) sufficient statistics.

Per class we keep count, mean vector and the M2 accumulator (sum of squared
deviations), so a sequence of partial_fit batches reproduces the batch fit
statistics up to floating-point merge error. Global per-feature statistics are
kept the same way because the variance-smoothing term depends on them.
"""

from __future__ import annotations

import numpy as np

from .base import Model

VAR_SMOOTHING = 1e-9


def _batch_stats(X: np.ndarray):
    n = X.shape[0]
    mean = X.mean(axis=0)
    m2 = ((X - mean) ** 2).sum(axis=0)
    return n, mean, m2


def merge_stats(n_a: int, mean_a: np.ndarray, m2_a: np.ndarray, n_b: int, mean_b: np.ndarray, m2_b: np.ndarray):
    """Chan et al. parallel merge of (count, mean, M2) accumulators."""
    if n_a == 0:
        return n_b, mean_b.copy(), m2_b.copy()
    if n_b == 0:
        return n_a, mean_a, m2_a
    n = n_a + n_b
    delta = mean_b - mean_a
    mean = mean_a + delta * (n_b / n)
    m2 = m2_a + m2_b + delta ** 2 * (n_a * n_b / n)
    return n, mean, m2


class GaussianNB(Model):
    def _reset(self, d: int):
        k = len(self.classes)
        self.counts = np.zeros(k, dtype=int)
        self.means = np.zeros((k, d))
        self.m2 = np.zeros((k, d))
        self.total_n = 0
        self.total_mean = np.zeros(d)
        self.total_m2 = np.zeros(d)

    def _do_fit(self, X, y):
        self._reset(X.shape[1])
        self._merge_batch(X, y)

    def _do_partial_fit(self, X, y):
        if not self.fitted:
            self._reset(X.shape[1])
        self._merge_batch(X, y)

    def _merge_batch(self, X, y):
        for i, c in enumerate(self.classes):
            grp = X[y == c]
            if grp.shape[0] == 0:
                continue
            n_b, mean_b, m2_b = _batch_stats(grp)
            self.counts[i], self.means[i], self.m2[i] = merge_stats(
                int(self.counts[i]), self.means[i], self.m2[i], n_b, mean_b, m2_b
            )
        n_b, mean_b, m2_b = _batch_stats(X)
        self.total_n, self.total_mean, self.total_m2 = merge_stats(
            self.total_n, self.total_mean, self.total_m2, n_b, mean_b, m2_b
        )

    def class_priors(self) -> np.ndarray:
        total = self.counts.sum()
        return self.counts / total

    def class_variances(self) -> np.ndarray:
        out = np.zeros_like(self.m2)
        seen = self.counts > 0
        out[seen] = self.m2[seen] / self.counts[seen, None]
        return out

    def _smoothing(self) -> float:
        max_var = float((self.total_m2 / self.total_n).max()) if self.total_n else 0.0
        return VAR_SMOOTHING * max_var if max_var > 0 else VAR_SMOOTHING

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        variances = self.class_variances() + self._smoothing()
        priors = self.class_priors()
        jll = np.full((X.shape[0], len(self.classes)), -np.inf)
        for i in range(len(self.classes)):
            if self.counts[i] == 0:
                continue  # unseen class can never win
            log_prior = np.log(priors[i])
            quad = ((X - self.means[i]) ** 2 / variances[i]).sum(axis=1)
            jll[:, i] = log_prior - 0.5 * (np.log(2.0 * np.pi * variances[i]).sum() + quad)
        return jll

    def _do_predict(self, X):
        jll = self.joint_log_likelihood(X)
        best = np.argmax(jll, axis=1)  # first max -> smallest class index
        return np.asarray(self.classes, dtype=int)[best]

    def _state_dict(self):
        return {
            "counts": self.counts.tolist(),
            "means": self.means.tolist(),
            "m2": self.m2.tolist(),
            "total_n": int(self.total_n),
            "total_mean": self.total_mean.tolist(),
            "total_m2": self.total_m2.tolist(),
        }

    def _restore(self, state):
        self.counts = np.asarray(state["counts"], dtype=int)
        self.means = np.asarray(state["means"], dtype=float)
        self.m2 = np.asarray(state["m2"], dtype=float)
        self.total_n = int(state["total_n"])
        self.total_mean = np.asarray(state["total_mean"], dtype=float)
        self.total_m2 = np.asarray(state["total_m2"], dtype=float)
