"""Fitted preprocessing chain: impute -> encode -> normalize -> select/extract.

A chain is fitted once on training rows and then applied unchanged to
validation/test/prediction data, so train statistics are never recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import (
    Dataset,
    FeatureEncoder,
    Imputer,
    LabelEncoding,
    Normalizer,
    fit_feature_encoder,
    fit_normalizer,
)
from .errors import DataError
from .features import FeatureMask, FeaturePolicy, PcaModel, pca_fit, select_features


@dataclass(frozen=True)
class PreprocessingChain:
    encoder: FeatureEncoder
    imputer: Optional[Imputer] = None
    normalizer: Optional[Normalizer] = None
    mask: Optional[FeatureMask] = None
    pca: Optional[PcaModel] = None

    @property
    def feature_names(self) -> tuple[str, ...]:
        names = self.encoder.feature_names
        if self.mask is not None:
            return self.mask.kept_names(names)
        if self.pca is not None:
            return tuple(f"pc{i + 1}" for i in range(self.pca.k))
        return names

    def transform(self, d: Dataset) -> np.ndarray:
        if self.imputer is not None:
            d = self.imputer.apply(d)
        X = self.encoder.transform(d)
        return self.transform_matrix(X)

    def transform_matrix(self, X: np.ndarray) -> np.ndarray:
        if self.normalizer is not None:
            X = self.normalizer.transform(X)
        if self.mask is not None:
            X = self.mask.apply(X)
        elif self.pca is not None:
            X = self.pca.transform(X)
        return X


def targets(d: Dataset, task: str, label_encoding: Optional[LabelEncoding]) -> np.ndarray:
    """Label column as encoded class indices or as a float vector."""
    label = d.schema.label_column
    if label is None:
        raise DataError("no label column designated")
    if task == "classification":
        assert label_encoding is not None
        return label_encoding.encode(d.label_tokens())
    if d.schema.kind_of(label) != "numeric":
        raise DataError(f"regression requires a numeric label column; '{label}' is categorical")
    values = d.column(label)
    if any(v is None for v in values):
        raise DataError(f"label column '{label}' has missing values")
    return np.asarray(values, dtype=float)


def fit_chain(
    train: Dataset,
    task: str,
    label_encoding: Optional[LabelEncoding],
    normalize: bool = False,
    feature_policy: Optional[FeaturePolicy] = None,
    imputer: Optional[Imputer] = None,
) -> PreprocessingChain:
    encoder = fit_feature_encoder(train)
    source = imputer.apply(train) if imputer is not None else train
    X = encoder.transform(source)
    normalizer = fit_normalizer(X) if normalize else None
    if normalizer is not None:
        X = normalizer.transform(X)
    mask = pca = None
    if feature_policy is not None:
        if feature_policy.kind == "extraction":
            k = feature_policy.k
            if k is None:
                k = min(X.shape[1], X.shape[0])
            pca = pca_fit(X, k)
        else:
            y = targets(source, task, label_encoding)
            mask = select_features(X, y, feature_policy, task)
    return PreprocessingChain(
        encoder=encoder, imputer=imputer, normalizer=normalizer, mask=mask, pca=pca
    )
