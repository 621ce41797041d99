"""Supervised feature selection, PCA feature extraction, and feature export."""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DataError

FLOAT_MAX = np.finfo(float).max


@dataclass(frozen=True)
class FeaturePolicy:
    """Which feature-engineering stage to apply.

    kind: "selection" or "extraction".
    selection method: ("variance", threshold) or ("top_k", k).
    extraction: k = component count, or None for all components.
    """

    kind: str
    method: Optional[str] = None
    threshold: float = 0.0
    k: Optional[int] = None

    @staticmethod
    def parse_selection(text: str) -> "FeaturePolicy":
        method, _, arg = text.partition(":")
        if method == "variance":
            return FeaturePolicy(kind="selection", method="variance", threshold=float(arg or 0.0))
        if method == "top_k":
            if not arg:
                raise DataError("top_k selection requires a count, e.g. top_k:5")
            return FeaturePolicy(kind="selection", method="top_k", k=int(arg))
        raise DataError(f"unknown selection policy '{text}' (use variance:<t> or top_k:<k>)")

    def describe(self) -> str:
        if self.kind == "extraction":
            return f"pca(k={self.k if self.k is not None else 'all'})"
        if self.method == "variance":
            return f"variance(threshold={self.threshold})"
        return f"top_k(k={self.k})"


@dataclass(frozen=True)
class FeatureMask:
    keep: np.ndarray  # boolean per column
    scores: np.ndarray
    policy: str

    def __post_init__(self):
        if not bool(self.keep.any()):
            raise DataError("feature selection eliminated every column")
        if not np.all(np.isfinite(self.scores)):
            raise DataError("feature scores must be finite")

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.keep.shape[0]:
            raise DataError(f"mask covers {self.keep.shape[0]} columns, got {X.shape[1]}")
        return X[:, self.keep]

    def kept_names(self, names: Sequence[str]) -> tuple[str, ...]:
        return tuple(n for n, k in zip(names, self.keep) if k)


def _anova_f(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """One-way ANOVA F statistic per column; separating columns get FLOAT_MAX."""
    classes = np.unique(y)
    n, d = X.shape
    grand = X.mean(axis=0)
    ss_between = np.zeros(d)
    ss_within = np.zeros(d)
    for c in classes:
        grp = X[y == c]
        mean_c = grp.mean(axis=0)
        ss_between += len(grp) * (mean_c - grand) ** 2
        ss_within += ((grp - mean_c) ** 2).sum(axis=0)
    k = len(classes)
    scores = np.zeros(d)
    if k > 1 and n > k:
        ms_between = ss_between / (k - 1)
        ms_within = ss_within / (n - k)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = ms_between / ms_within
        scores = np.where(ms_within > 0, np.nan_to_num(f, posinf=FLOAT_MAX),
                          np.where(ms_between > 0, FLOAT_MAX, 0.0))
    return scores


def _abs_pearson(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    xc = X - X.mean(axis=0)
    yc = y - y.mean()
    sx = np.sqrt((xc ** 2).sum(axis=0))
    sy = np.sqrt((yc ** 2).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (xc * yc[:, None]).sum(axis=0) / (sx * sy)
    return np.abs(np.nan_to_num(r, nan=0.0))


def relevance_scores(X: np.ndarray, y: np.ndarray, task: str) -> np.ndarray:
    """ANOVA F for classification, |Pearson correlation| for regression."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if task == "classification":
        return _anova_f(X, y.astype(int))
    return _abs_pearson(X, y.astype(float))


def select_features(X: np.ndarray, y, policy: FeaturePolicy, task: str = "classification") -> FeatureMask:
    """Keep columns by population-variance threshold or by top-k relevance.

    Ties in the top-k ranking are broken toward the lower column index.
    """
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise DataError("cannot select features from an empty matrix")
    d = X.shape[1]
    if policy.method == "variance":
        variances = X.var(axis=0)  # population
        keep = variances > policy.threshold
        return FeatureMask(keep=keep, scores=variances, policy=policy.describe())
    if policy.method == "top_k":
        k = policy.k
        if k is None or not (1 <= k <= d):
            raise DataError(f"top_k requires 1 <= k <= {d}, got {k}")
        if y is None or len(y) != X.shape[0]:
            raise DataError("top_k selection requires targets aligned with X")
        scores = relevance_scores(X, y, task)
        order = sorted(range(d), key=lambda j: (-scores[j], j))
        keep = np.zeros(d, dtype=bool)
        keep[order[:k]] = True
        return FeatureMask(keep=keep, scores=scores, policy=policy.describe())
    raise DataError(f"unknown selection method '{policy.method}'")


@dataclass(frozen=True)
class PcaModel:
    components: np.ndarray  # (k, d), row-orthonormal
    explained_variance: np.ndarray  # (k,), non-increasing
    means: np.ndarray  # (d,)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.means.shape[0]:
            raise DataError(
                f"PCA fitted on {self.means.shape[0]} columns, got matrix with shape {X.shape}"
            )
        return (X - self.means) @ self.components.T

    @property
    def k(self) -> int:
        return self.components.shape[0]


def pca_fit(X: np.ndarray, k: int) -> PcaModel:
    """Principal components of the population covariance of centered X.

    Components are ordered by descending eigenvalue; the largest-magnitude
    entry of each component is made positive. With repeated eigenvalues any
    orthonormal basis of the eigenspace may be returned.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("PCA requires a matrix with at least 2 rows")
    n, d = X.shape
    if not (1 <= k <= min(n, d)):
        raise DataError(f"component count must satisfy 1 <= k <= min(N, d) = {min(n, d)}, got {k}")
    means = X.mean(axis=0)
    centered = X - means
    cov = centered.T @ centered / n  # population
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:k]
    values = np.clip(eigvals[order], 0.0, None)
    components = eigvecs[:, order].T
    for i in range(components.shape[0]):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    return PcaModel(components=components, explained_variance=values, means=means)


def pca_transform(model: PcaModel, X: np.ndarray) -> np.ndarray:
    return model.transform(X)


# --- export -------------------------------------------------------------

BUNDLE_MAGIC = b"AMXF"
BUNDLE_VERSION = 1


def export_features(X: np.ndarray, headers: Sequence[str], path, fmt: str = "csv"):
    """Write a processed feature table as CSV or as the binary feature bundle."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(headers):
        raise DataError(f"matrix shape {X.shape} does not match {len(headers)} headers")
    if fmt == "csv":
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(list(headers))
                for row in X:
                    writer.writerow([repr(float(v)) for v in row])
        except OSError as exc:
            raise DataError(f"cannot write '{path}': {exc.strerror or exc}") from exc
    elif fmt == "bundle":
        rows, cols = X.shape
        try:
            with open(path, "wb") as fh:
                fh.write(BUNDLE_MAGIC)
                fh.write(struct.pack("<III", BUNDLE_VERSION, rows, cols))
                for name in headers:
                    encoded = name.encode("utf-8")
                    fh.write(struct.pack("<I", len(encoded)))
                    fh.write(encoded)
                fh.write(np.ascontiguousarray(X, dtype="<f8").tobytes())
        except OSError as exc:
            raise DataError(f"cannot write '{path}': {exc.strerror or exc}") from exc
    else:
        raise DataError(f"unknown export format '{fmt}' (use csv or bundle)")
    return path


def load_feature_bundle(path) -> tuple[np.ndarray, tuple[str, ...]]:
    """Read back a binary feature bundle written by export_features."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read '{path}': {exc.strerror or exc}") from exc
    if blob[:4] != BUNDLE_MAGIC:
        raise DataError(f"'{path}' is not a feature bundle (bad magic)")
    version, rows, cols = struct.unpack_from("<III", blob, 4)
    if version != BUNDLE_VERSION:
        raise DataError(f"'{path}' has unsupported feature-bundle version {version}")
    offset = 16
    headers = []
    for _ in range(cols):
        (length,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        headers.append(blob[offset:offset + length].decode("utf-8"))
        offset += length
    matrix = np.frombuffer(blob, dtype="<f8", count=rows * cols, offset=offset)
    return matrix.reshape(rows, cols).copy(), tuple(headers)
