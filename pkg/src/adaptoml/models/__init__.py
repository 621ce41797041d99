"""Model zoo: family registry and the uniform fit/predict/partial_fit/clone surface."""

from __future__ import annotations

from ..errors import DataError
from .base import CLASSIFICATION, REGRESSION, FamilyInfo, Model, ModelSpec
from .linear_sgd import SGDClassifier, SGDRegressor
from .naive_bayes import GaussianNB
from .neighbors import KNNClassifier, KNNRegressor
from .tree import DecisionTree

_SGD_DEFAULTS = {"learning_rate": 0.01, "epochs": 100, "l2": 0.0, "seed": 0}

FAMILIES: dict[str, tuple[FamilyInfo, type]] = {
    "gaussian_nb": (FamilyInfo("gaussian_nb", CLASSIFICATION, True, {}), GaussianNB),
    "sgd_classifier": (FamilyInfo("sgd_classifier", CLASSIFICATION, True, dict(_SGD_DEFAULTS)), SGDClassifier),
    "knn_classifier": (FamilyInfo("knn_classifier", CLASSIFICATION, True, {"k": 5}), KNNClassifier),
    "decision_tree": (FamilyInfo("decision_tree", CLASSIFICATION, False, {"max_depth": 10, "min_samples_split": 2}), DecisionTree),
    "sgd_regressor": (FamilyInfo("sgd_regressor", REGRESSION, True, dict(_SGD_DEFAULTS)), SGDRegressor),
    "knn_regressor": (FamilyInfo("knn_regressor", REGRESSION, True, {"k": 5}), KNNRegressor),
}

ZOO_ORDER = tuple(FAMILIES)


def family_info(name: str) -> FamilyInfo:
    try:
        return FAMILIES[name][0]
    except KeyError:
        raise DataError(f"unknown model family '{name}' (choose from {', '.join(FAMILIES)})") from None


def families_for_task(task: str) -> tuple[str, ...]:
    return tuple(name for name in ZOO_ORDER if FAMILIES[name][0].task == task)


def create_model(spec: ModelSpec) -> Model:
    _, cls = FAMILIES[family_info(spec.family).name]
    return cls(spec)


def fit(spec: ModelSpec, X, y) -> Model:
    return create_model(spec).fit(X, y)


__all__ = [
    "CLASSIFICATION",
    "REGRESSION",
    "FAMILIES",
    "ZOO_ORDER",
    "Model",
    "ModelSpec",
    "create_model",
    "families_for_task",
    "family_info",
    "fit",
]
