"""Exhaustive grid search over preprocessing variants, families and hyperparameters."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import reporting
from .chain import PreprocessingChain, fit_chain, targets
from .dataset import Imputer, LabelEncoding, SplitDataset, concat
from .errors import AdaptomlError, DataError
from .features import FeaturePolicy
from .models import Model, ModelSpec, ZOO_ORDER, create_model, family_info

DEFAULT_GRIDS: dict[str, list[dict]] = {
    "gaussian_nb": [{}],
    "sgd_classifier": [
        {"learning_rate": lr, "l2": l2} for lr in (0.1, 0.01, 0.001) for l2 in (0.0, 1e-4)
    ],
    "knn_classifier": [{"k": k} for k in (1, 3, 5, 7)],
    "decision_tree": [{"max_depth": depth} for depth in (3, 5, 10)],
    "sgd_regressor": [
        {"learning_rate": lr, "l2": l2} for lr in (0.1, 0.01, 0.001) for l2 in (0.0, 1e-4)
    ],
    "knn_regressor": [{"k": k} for k in (1, 3, 5, 7)],
}


@dataclass(frozen=True)
class Candidate:
    candidate_id: int
    family: str
    hyperparameters: dict
    normalize: bool
    feature_policy: Optional[FeaturePolicy]

    def spec(self, seed: int) -> ModelSpec:
        params = dict(self.hyperparameters)
        if "seed" in family_info(self.family).defaults:
            params.setdefault("seed", seed)
        return ModelSpec(family=self.family, hyperparameters=params)


@dataclass(frozen=True)
class SearchConfig:
    task: str
    families: tuple[str, ...]
    criterion: str
    seed: int = 42
    normalization: Optional[bool] = None  # None grids over {on, off}
    feature_policy: Optional[FeaturePolicy] = None
    imputer: Optional[Imputer] = None
    workers: int = 1
    grids: Optional[dict] = None


@dataclass
class CandidateResult:
    candidate: Candidate
    validation_score: Optional[float] = None
    test_score: Optional[float] = None
    validation_metrics: list = field(default_factory=list)
    test_metrics: list = field(default_factory=list)
    wall_time: float = 0.0
    error: Optional[str] = None
    model: Optional[Model] = None
    chain: Optional[PreprocessingChain] = None


@dataclass
class SearchResult:
    results: list[CandidateResult]
    best_id: int
    criterion: str
    direction: str  # maximize | minimize

    @property
    def best(self) -> CandidateResult:
        return self.results[self.best_id]


def default_grid(
    task: str,
    enabled_families: Sequence[str],
    normalization: Optional[bool] = None,
    feature_policy: Optional[FeaturePolicy] = None,
    grids: Optional[dict] = None,
) -> list[Candidate]:
    """Cartesian product of per-family grids with preprocessing variants.

    Enumeration order is fixed: zoo order, then hyperparameter grid order,
    then normalization on before off. candidate_id is the ordinal.
    """
    if not enabled_families:
        raise DataError("no model families enabled")
    for family in enabled_families:
        info = family_info(family)
        if info.task != task:
            raise DataError(f"family '{family}' is not compatible with task '{task}'")
    grids = grids or DEFAULT_GRIDS
    norm_variants = (True, False) if normalization is None else (normalization,)
    candidates = []
    for family in ZOO_ORDER:
        if family not in enabled_families:
            continue
        for params in grids[family]:
            for norm in norm_variants:
                candidates.append(
                    Candidate(
                        candidate_id=len(candidates),
                        family=family,
                        hyperparameters=dict(params),
                        normalize=norm,
                        feature_policy=feature_policy,
                    )
                )
    return candidates


def evaluate_candidate(
    candidate: Candidate,
    split: SplitDataset,
    criterion: str,
    task: str,
    label_encoding: Optional[LabelEncoding],
    seed: int,
    imputer: Optional[Imputer] = None,
) -> CandidateResult:
    """Fit the candidate's chain and model on train only; score on validation and test."""
    if split.train.n_rows == 0 or split.validation.n_rows == 0:
        raise DataError("candidate evaluation requires non-empty train and validation splits")
    result = CandidateResult(candidate=candidate)
    started = time.perf_counter()
    try:
        chain = fit_chain(
            split.train,
            task,
            label_encoding,
            normalize=candidate.normalize,
            feature_policy=candidate.feature_policy,
            imputer=imputer,
        )
        model = create_model(candidate.spec(seed))
        model.feature_signature = chain.feature_names
        y_train = targets(split.train, task, label_encoding)
        model.fit(chain.transform(split.train), y_train)
        classes = range(len(label_encoding.classes)) if label_encoding else ()
        y_val = targets(split.validation, task, label_encoding)
        pred_val = model.predict(chain.transform(split.validation))
        result.validation_score = reporting.score(task, criterion, y_val, pred_val, classes)
        result.validation_metrics = reporting.metric_rows(task, y_val, pred_val, classes)
        if split.test.n_rows > 0:
            y_test = targets(split.test, task, label_encoding)
            pred_test = model.predict(chain.transform(split.test))
            result.test_score = reporting.score(task, criterion, y_test, pred_test, classes)
            result.test_metrics = reporting.metric_rows(task, y_test, pred_test, classes)
        result.model = model
        result.chain = chain
    except AdaptomlError as exc:
        result.error = f"candidate {candidate.candidate_id}: {exc}"
    result.wall_time = time.perf_counter() - started
    return result


def _better(direction: str, challenger: float, incumbent: float) -> bool:
    return challenger > incumbent if direction == "maximize" else challenger < incumbent


def grid_search(
    split: SplitDataset,
    config: SearchConfig,
    label_encoding: Optional[LabelEncoding] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SearchResult:
    """Evaluate every candidate; the winner is the validation-score optimum.

    Ties resolve to the lower candidate_id. Results keep enumeration order
    regardless of the execution schedule; failed candidates carry an error
    marker and never win.
    """
    candidates = default_grid(
        config.task, config.families, config.normalization, config.feature_policy, config.grids
    )
    direction = reporting.criterion_direction(config.criterion)

    def run(candidate: Candidate) -> CandidateResult:
        return evaluate_candidate(
            candidate, split, config.criterion, config.task, label_encoding, config.seed, config.imputer
        )

    results: list[Optional[CandidateResult]] = [None] * len(candidates)
    done = 0
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            for res in pool.map(run, candidates):
                results[res.candidate.candidate_id] = res
                done += 1
                if progress:
                    progress(done, len(candidates))
    else:
        for candidate in candidates:
            res = run(candidate)
            results[res.candidate.candidate_id] = res
            done += 1
            if progress:
                progress(done, len(candidates))

    best_id = None
    best_score = None
    for res in results:
        if res.error is not None or res.validation_score is None:
            continue
        if best_id is None or _better(direction, res.validation_score, best_score):
            best_id, best_score = res.candidate.candidate_id, res.validation_score
    if best_id is None:
        failures = "; ".join(r.error for r in results if r.error)
        raise DataError(f"all candidates failed: {failures}")
    return SearchResult(results=results, best_id=best_id, criterion=config.criterion, direction=direction)


def select_best(
    result: SearchResult,
    split: SplitDataset,
    config: SearchConfig,
    label_encoding: Optional[LabelEncoding] = None,
) -> tuple[Model, PreprocessingChain]:
    """Refit the winning candidate on train + validation; test rows stay untouched."""
    candidate = result.best.candidate
    merged = concat([split.train, split.validation]) if split.validation.n_rows else split.train
    chain = fit_chain(
        merged,
        config.task,
        label_encoding,
        normalize=candidate.normalize,
        feature_policy=candidate.feature_policy,
        imputer=config.imputer,
    )
    model = create_model(candidate.spec(config.seed))
    model.feature_signature = chain.feature_names
    model.fit(chain.transform(merged), targets(merged, config.task, label_encoding))
    return model, chain
