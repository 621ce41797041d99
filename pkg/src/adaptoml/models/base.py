"""Uniform model contracts: specs, fit / predict / partial_fit / clone."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import CapabilityError, DataError, SignatureError

CLASSIFICATION = "classification"
REGRESSION = "regression"


@dataclass(frozen=True)
class FamilyInfo:
    name: str
    task: str
    incremental: bool
    defaults: dict


@dataclass(frozen=True)
class ModelSpec:
    family: str
    hyperparameters: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        from . import family_info  # registry lives in the package root

        info = family_info(self.family)
        params = dict(info.defaults)
        for key, value in self.hyperparameters.items():
            if key not in info.defaults:
                raise DataError(f"unknown hyperparameter '{key}' for family '{self.family}'")
            params[key] = value
        _check_ranges(self.family, params)
        return params


def _check_ranges(family: str, params: dict):
    checks = {
        "k": lambda v: v >= 1,
        "learning_rate": lambda v: v > 0,
        "epochs": lambda v: v >= 1,
        "l2": lambda v: v >= 0,
        "max_depth": lambda v: v >= 1,
        "min_samples_split": lambda v: v >= 2,
        "seed": lambda v: True,
    }
    for key, value in params.items():
        ok = checks.get(key, lambda v: True)
        if not ok(value):
            raise DataError(f"hyperparameter {key}={value!r} out of range for family '{family}'")


def as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.size == 0:
        raise DataError("empty feature matrix")
    if not np.isfinite(X).all():
        raise DataError("feature matrix contains NaN or infinite values")
    return X


class Model:
    """Shared state and guards; families override the _do_* hooks."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        self.params = spec.resolved()
        self.fitted = False
        self.n_features: Optional[int] = None
        self.feature_signature: Optional[tuple[str, ...]] = None
        self.classes: Optional[list[int]] = None

    # -- capabilities --
    @property
    def incremental(self) -> bool:
        from . import family_info

        return family_info(self.spec.family).incremental

    @property
    def task(self) -> str:
        from . import family_info

        return family_info(self.spec.family).task

    # -- contract surface --
    def fit(self, X, y) -> "Model":
        X = as_matrix(X)
        y = np.asarray(y)
        if X.shape[0] != y.shape[0] or X.shape[0] < 1:
            raise DataError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        if self.task == CLASSIFICATION:
            y = y.astype(int)
            self.classes = sorted(int(c) for c in np.unique(y))
        else:
            y = y.astype(float)
        self.n_features = X.shape[1]
        self._do_fit(X, y)
        self.fitted = True
        return self

    def partial_fit(self, X, y, classes: Optional[Sequence[int]] = None) -> "Model":
        if not self.incremental:
            raise CapabilityError(f"family '{self.spec.family}' does not support partial_fit")
        X = as_matrix(X)
        y = np.asarray(y)
        if X.shape[0] != y.shape[0]:
            raise DataError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        if self.task == CLASSIFICATION:
            y = y.astype(int)
            if not self.fitted:
                if classes is None:
                    raise DataError("first partial_fit on a fresh classifier requires the class list")
                self.classes = sorted(int(c) for c in classes)
            unknown = set(int(c) for c in np.unique(y)) - set(self.classes)
            if unknown:
                raise DataError(f"unknown class indices in partial_fit batch: {sorted(unknown)}")
        else:
            y = y.astype(float)
        if self.n_features is None:
            self.n_features = X.shape[1]
        elif X.shape[1] != self.n_features:
            raise SignatureError(
                f"model was trained on {self.n_features} features, batch has {X.shape[1]}"
            )
        self._do_partial_fit(X, y)
        self.fitted = True
        return self

    def predict(self, X) -> np.ndarray:
        if not self.fitted:
            raise DataError("model is not fitted")
        X = as_matrix(X)
        if X.shape[1] != self.n_features:
            raise SignatureError(
                f"model was trained on {self.n_features} features, input has {X.shape[1]}"
            )
        return self._do_predict(X)

    def clone(self) -> "Model":
        return copy.deepcopy(self)

    # -- persistence hooks --
    def export_state(self) -> dict:
        state = self._state_dict()
        state["fitted"] = self.fitted
        state["n_features"] = self.n_features
        if self.classes is not None:
            state["classes"] = list(self.classes)
        return state

    def load_state(self, state: dict):
        self.fitted = bool(state.get("fitted", True))
        self.n_features = state.get("n_features")
        if "classes" in state:
            self.classes = [int(c) for c in state["classes"]]
        self._restore(state)
        return self

    # -- hooks --
    def _do_fit(self, X, y):
        raise NotImplementedError

    def _do_partial_fit(self, X, y):
        raise NotImplementedError

    def _do_predict(self, X) -> np.ndarray:
        raise NotImplementedError

    def _state_dict(self) -> dict:
        raise NotImplementedError

    def _restore(self, state: dict):
        raise NotImplementedError
