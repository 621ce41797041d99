"""Versioned model-bundle files: preprocessing chain + model parameters as pure data.

The bundle is a UTF-8 JSON document; floats round-trip bit-exactly through
Python's shortest-repr float formatting. Loading never executes embedded
content. Writes are atomic (temp file + rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from .chain import PreprocessingChain
from .dataset import Column, FeatureEncoder, Imputer, LabelEncoding, Normalizer
from .errors import PersistenceError
from .features import FeatureMask, PcaModel
from .models import Model, ModelSpec, create_model, family_info

FORMAT_VERSION = 1

BUNDLE_FIELDS = (
    "format_version",
    "created_utc",
    "task",
    "label_encoding",
    "preprocessing",
    "model",
    "feature_signature",
)


def build_bundle(
    model: Model,
    chain: PreprocessingChain,
    task: str,
    label_encoding: Optional[LabelEncoding],
) -> dict:
    """Assemble the serializable bundle document; stamps the creation time."""
    preprocessing = {
        "imputer": None
        if chain.imputer is None
        else {"policy": chain.imputer.policy, "fill_values": dict(chain.imputer.fill_values)},
        "encoder": {
            "columns": [[c.name, c.kind] for c in chain.encoder.source_columns],
            "categories": {k: list(v) for k, v in chain.encoder.categories.items()},
        },
        "normalizer": None
        if chain.normalizer is None
        else {"means": chain.normalizer.means.tolist(), "stds": chain.normalizer.stds.tolist()},
        "feature_stage": _feature_stage_doc(chain),
    }
    return {
        "format_version": FORMAT_VERSION,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "task": task,
        "label_encoding": None if label_encoding is None else list(label_encoding.classes),
        "preprocessing": preprocessing,
        "model": {
            "family": model.spec.family,
            "hyperparameters": dict(model.params),
            "parameters": model.export_state(),
        },
        "feature_signature": list(model.feature_signature or chain.feature_names),
    }


def _feature_stage_doc(chain: PreprocessingChain):
    if chain.mask is not None:
        return {
            "kind": "mask",
            "keep": [bool(b) for b in chain.mask.keep],
            "scores": chain.mask.scores.tolist(),
            "policy": chain.mask.policy,
        }
    if chain.pca is not None:
        return {
            "kind": "pca",
            "components": chain.pca.components.tolist(),
            "explained_variance": chain.pca.explained_variance.tolist(),
            "means": chain.pca.means.tolist(),
        }
    return None


def save_model(bundle: dict, path) -> str:
    """Atomic write: temp file in the target directory, then rename over path."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    try:
        text = json.dumps(bundle, indent=2, allow_nan=False)
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise PersistenceError(f"cannot write '{path}': {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise PersistenceError(f"bundle for '{path}' contains non-finite values: {exc}") from exc
    return str(path)


@dataclass
class LoadedModel:
    path: str
    task: str
    label_encoding: Optional[LabelEncoding]
    chain: PreprocessingChain
    model: Model
    created_utc: str

    @property
    def feature_signature(self) -> tuple[str, ...]:
        return tuple(self.model.feature_signature or ())


def load_models(paths: Sequence) -> list[LoadedModel]:
    return [_load_one(p) for p in paths]


def _fail(path, message: str):
    raise PersistenceError(f"{path}: {message}")


def _load_one(path) -> LoadedModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        _fail(path, f"cannot read file: {exc.strerror or exc}")
    except json.JSONDecodeError as exc:
        _fail(path, f"malformed bundle document: {exc}")
    if not isinstance(doc, dict):
        _fail(path, "malformed bundle document: top level must be an object")
    missing = [f for f in BUNDLE_FIELDS if f not in doc]
    if missing:
        _fail(path, f"missing bundle fields: {', '.join(missing)}")
    version = doc["format_version"]
    if version != FORMAT_VERSION:
        _fail(path, f"unknown bundle format version {version!r} (expected {FORMAT_VERSION})")
    task = doc["task"]
    if task not in ("classification", "regression"):
        _fail(path, f"unknown task {task!r}")

    label_encoding = None
    if doc["label_encoding"] is not None:
        classes = doc["label_encoding"]
        if not isinstance(classes, list) or not classes:
            _fail(path, "label_encoding must be a non-empty list")
        label_encoding = LabelEncoding(classes=tuple(str(c) for c in classes))

    chain = _restore_chain(path, doc["preprocessing"])
    signature = doc["feature_signature"]
    if not isinstance(signature, list) or not signature:
        _fail(path, "feature_signature must be a non-empty list")
    if list(chain.feature_names) != [str(s) for s in signature]:
        _fail(path, "feature_signature does not match the preprocessing chain output")

    model_doc = doc["model"]
    if not isinstance(model_doc, dict) or not {"family", "hyperparameters", "parameters"} <= set(model_doc):
        _fail(path, "model section must carry family, hyperparameters and parameters")
    try:
        info = family_info(model_doc["family"])
        spec = ModelSpec(family=info.name, hyperparameters={
            k: v for k, v in model_doc["hyperparameters"].items()
        })
        model = create_model(spec)
        model.load_state(model_doc["parameters"])
    except Exception as exc:
        raise PersistenceError(f"{path}: invalid model parameters: {exc}") from exc
    if info.task != task:
        _fail(path, f"model family '{info.name}' does not match task '{task}'")
    model.feature_signature = tuple(str(s) for s in signature)
    _check_model_shapes(path, model, len(signature), label_encoding)
    return LoadedModel(
        path=str(path),
        task=task,
        label_encoding=label_encoding,
        chain=chain,
        model=model,
        created_utc=str(doc["created_utc"]),
    )


def _restore_chain(path, doc) -> PreprocessingChain:
    if not isinstance(doc, dict) or "encoder" not in doc:
        _fail(path, "preprocessing section must carry an encoder")
    enc = doc["encoder"]
    try:
        columns = tuple(Column(name=str(n), kind=str(k)) for n, k in enc["columns"])
        categories = {str(k): tuple(str(c) for c in v) for k, v in enc.get("categories", {}).items()}
        encoder = FeatureEncoder(source_columns=columns, categories=categories)
        n_features = len(encoder.feature_names)
    except Exception as exc:
        raise PersistenceError(f"{path}: invalid encoder section: {exc}") from exc

    imputer = None
    if doc.get("imputer") is not None:
        imp = doc["imputer"]
        imputer = Imputer(policy=str(imp["policy"]), fill_values=dict(imp["fill_values"]))

    normalizer = None
    if doc.get("normalizer") is not None:
        norm = doc["normalizer"]
        means = np.asarray(norm["means"], dtype=float)
        stds = np.asarray(norm["stds"], dtype=float)
        if means.shape != stds.shape or means.shape != (n_features,):
            _fail(path, f"normalizer shape {means.shape} inconsistent with {n_features} encoded features")
        normalizer = Normalizer(means=means, stds=stds)

    mask = pca = None
    stage = doc.get("feature_stage")
    if stage is not None:
        kind = stage.get("kind")
        if kind == "mask":
            keep = np.asarray(stage["keep"], dtype=bool)
            scores = np.asarray(stage["scores"], dtype=float)
            if keep.shape != (n_features,) or scores.shape != (n_features,):
                _fail(path, f"feature mask shape inconsistent with {n_features} encoded features")
            mask = FeatureMask(keep=keep, scores=scores, policy=str(stage.get("policy", "")))
        elif kind == "pca":
            components = np.asarray(stage["components"], dtype=float)
            variances = np.asarray(stage["explained_variance"], dtype=float)
            means = np.asarray(stage["means"], dtype=float)
            if components.ndim != 2 or components.shape[1] != n_features or means.shape != (n_features,):
                _fail(path, f"PCA shapes inconsistent with {n_features} encoded features")
            if variances.shape != (components.shape[0],):
                _fail(path, "PCA explained_variance length does not match component count")
            pca = PcaModel(components=components, explained_variance=variances, means=means)
        else:
            _fail(path, f"unknown feature stage kind {kind!r}")
    return PreprocessingChain(encoder=encoder, imputer=imputer, normalizer=normalizer, mask=mask, pca=pca)


def _check_model_shapes(path, model: Model, n_features: int, label_encoding: Optional[LabelEncoding]):
    if model.n_features != n_features:
        _fail(path, f"model expects {model.n_features} features but the signature lists {n_features}")
    if label_encoding is not None and model.classes is not None:
        if len(model.classes) != len(label_encoding.classes):
            _fail(path, "model class count does not match label encoding")
