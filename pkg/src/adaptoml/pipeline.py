"""End-to-end run orchestration: load -> impute -> split -> features -> search/fit
-> adapt -> load models -> predict -> incremental sessions -> reports.

Every stage is recorded in a trace so flag gating is observable, and any
stage failure aborts with a stage-tagged error listing the partial outputs
written so far.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from typing import Callable, Optional

import numpy as np

from . import persistence, reporting
from .adaptation import (
    AdaptationConfig,
    AdaptationResult,
    OmegaMetrics,
    SessionReport,
    adapt_models,
    kemker_metrics,
    partition_by_user,
    run_sessions,
)
from .chain import PreprocessingChain, targets
from .dataset import (
    DEFAULT_MISSING_MARKERS,
    Dataset,
    LabelEncoding,
    _round_half_up,
    encode_labels,
    fit_imputer,
    load_csv,
    split as split_dataset,
)
from .errors import AdaptomlError, ConfigError, DataError, PipelineError
from .features import FeaturePolicy, export_features
from .models import Model, families_for_task, family_info
from .reporting import criterion_direction, default_criterion, fmt
from .search import SearchConfig, SearchResult, grid_search, select_best

TASKS = ("classification", "regression")
IMPUTE_CHOICES = ("mean", "median", "most_frequent", "none")


@dataclass
class PipelineConfig:
    """Full run configuration; field names are the CLI/API contract."""

    data_path: str = ""
    label_column: str = ""
    personalization_column: str = ""
    task: str = ""
    impute: Optional[str] = None
    test_frac: float = 0.2
    val_frac: float = 0.2
    normalize: Optional[str] = None  # "on" / "off"; unset grids over both
    feature_extraction: Optional[object] = None  # component count or "auto"
    feature_selection: Optional[str] = None  # "variance:<t>" or "top_k:<k>"
    families: Optional[list[str]] = None
    criterion: Optional[str] = None
    fit: bool = True
    predict_path: Optional[str] = None
    partial_fit_path: Optional[str] = None
    sessions: int = 4
    adapt: bool = False
    model_paths: list[str] = field(default_factory=list)
    out_dir: Optional[str] = None
    seed: int = 42
    export_features: Optional[str] = None
    stratify: bool = False
    missing_markers: list[str] = field(default_factory=lambda: list(DEFAULT_MISSING_MARKERS))
    user_train_frac: float = 0.5

    def to_dict(self) -> dict:
        return asdict(self)


def _parse_impute(value: str) -> tuple[str, Optional[str]]:
    if value.startswith("constant:"):
        return "constant", value.split(":", 1)[1]
    return value, None


def validate_config(cfg: PipelineConfig) -> None:
    """Raise ConfigError listing every problem; silent when the config is valid."""
    errors = []
    for name in ("data_path", "label_column", "personalization_column", "task"):
        if not getattr(cfg, name):
            errors.append(f"{name} required")
    if cfg.task and cfg.task not in TASKS:
        errors.append(f"task must be one of {', '.join(TASKS)}, got '{cfg.task}'")
    for name in ("test_frac", "val_frac", "user_train_frac"):
        value = getattr(cfg, name)
        if not (0.0 <= value < 1.0):
            errors.append(f"{name} must lie in [0, 1), got {value}")
    if cfg.sessions < 1:
        errors.append(f"sessions must be >= 1, got {cfg.sessions}")
    if cfg.impute is not None:
        policy, constant = _parse_impute(cfg.impute)
        if policy not in IMPUTE_CHOICES and policy != "constant":
            errors.append(
                f"impute must be one of {', '.join(IMPUTE_CHOICES)} or constant:<value>, got '{cfg.impute}'"
            )
        elif policy == "constant" and constant in (None, ""):
            errors.append("constant imputation needs a value, e.g. constant:0")
    if cfg.normalize is not None and cfg.normalize not in ("on", "off"):
        errors.append(f"normalize must be 'on' or 'off', got '{cfg.normalize}'")
    if cfg.feature_selection is not None:
        try:
            FeaturePolicy.parse_selection(cfg.feature_selection)
        except (DataError, ValueError) as exc:
            errors.append(str(exc))
    if cfg.feature_extraction is not None and cfg.feature_extraction != "auto":
        try:
            if int(cfg.feature_extraction) < 1:
                errors.append("feature_extraction component count must be >= 1")
        except (TypeError, ValueError):
            errors.append(
                f"feature_extraction must be a component count or 'auto', got {cfg.feature_extraction!r}"
            )
    if cfg.task in TASKS:
        allowed = families_for_task(cfg.task)
        for family in cfg.families or ():
            try:
                info = family_info(family)
                if info.task != cfg.task:
                    errors.append(f"family '{family}' is not a {cfg.task} family")
            except AdaptomlError as exc:
                errors.append(str(exc))
        if cfg.families is not None and not cfg.families:
            errors.append(f"families must name at least one of {', '.join(allowed)}")
        if cfg.criterion is not None:
            valid = (
                reporting.CLASSIFICATION_CRITERIA if cfg.task == "classification" else reporting.REGRESSION_CRITERIA
            )
            if cfg.criterion not in valid:
                errors.append(
                    f"criterion for {cfg.task} must be one of {', '.join(valid)}, got '{cfg.criterion}'"
                )
    if cfg.export_features is not None and cfg.export_features not in ("csv", "bundle"):
        errors.append(f"export_features must be 'csv' or 'bundle', got '{cfg.export_features}'")
    needs_model = bool(cfg.predict_path or cfg.partial_fit_path or cfg.adapt)
    if needs_model and not cfg.fit and not cfg.model_paths:
        errors.append("predict, partial_fit or adaptation without fit requires model_paths")
    if errors:
        raise ConfigError(errors)


@dataclass
class RunOutputs:
    out_dir: str
    stage_trace: list[str] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    search_result: Optional[SearchResult] = None
    bundle_path: Optional[str] = None
    predictions_path: Optional[str] = None
    adaptation: Optional[AdaptationResult] = None
    session_report: Optional[SessionReport] = None
    omega: Optional[OmegaMetrics] = None
    loaded: list = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def default_out_dir() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%d-%H%M%S-%f")
    return os.path.join(".", "adaptoml_out", stamp)


def run_pipeline(cfg: PipelineConfig, on_progress: Optional[Callable] = None) -> RunOutputs:
    """Execute the full flag-gated pipeline; deterministic for a fixed seed."""
    validate_config(cfg)
    out_dir = cfg.out_dir or default_out_dir()
    os.makedirs(out_dir, exist_ok=True)
    run = RunOutputs(out_dir=out_dir)

    def notify(stage: str, done: Optional[int] = None, total: Optional[int] = None):
        if on_progress:
            on_progress(stage, done, total)

    def stage(name: str):
        run.stage_trace.append(name)
        notify(name)

    def fail(name: str, exc: Exception):
        raise PipelineError(name, str(exc), run.artifacts) from exc

    # load
    stage("load")
    try:
        data = load_csv(cfg.data_path, cfg.missing_markers).with_target(
            cfg.label_column, cfg.personalization_column
        )
    except AdaptomlError as exc:
        fail("load", exc)

    # impute (flag-gated)
    imputer = None
    if cfg.impute is not None and cfg.impute != "none":
        stage("impute")
        policy, constant = _parse_impute(cfg.impute)
        try:
            imputer = fit_imputer(data, policy, constant=constant)
            data = imputer.apply(data)
        except AdaptomlError as exc:
            fail("impute", exc)

    # split
    stage("split")
    try:
        parts = split_dataset(data, cfg.test_frac, cfg.val_frac, cfg.seed, stratify=cfg.stratify)
    except AdaptomlError as exc:
        fail("split", exc)

    label_encoding: Optional[LabelEncoding] = None
    if cfg.task == "classification":
        try:
            label_encoding, _ = encode_labels(data.label_tokens())
        except AdaptomlError as exc:
            fail("split", exc)

    # feature engineering flags: extraction wins over selection
    feature_policy = None
    if cfg.feature_extraction is not None:
        stage("feature_extract")
        k = None if cfg.feature_extraction == "auto" else int(cfg.feature_extraction)
        feature_policy = FeaturePolicy(kind="extraction", k=k)
    elif cfg.feature_selection is not None:
        stage("feature_select")
        feature_policy = FeaturePolicy.parse_selection(cfg.feature_selection)

    criterion = cfg.criterion or default_criterion(cfg.task)
    families = tuple(cfg.families) if cfg.families else families_for_task(cfg.task)
    normalization = None if cfg.normalize is None else cfg.normalize == "on"

    best_model: Optional[Model] = None
    best_chain: Optional[PreprocessingChain] = None
    search_config = SearchConfig(
        task=cfg.task,
        families=families,
        criterion=criterion,
        seed=cfg.seed,
        normalization=normalization,
        feature_policy=feature_policy,
        imputer=imputer,
    )
    if cfg.fit:
        stage("grid_search")
        try:
            run.search_result = grid_search(
                parts, search_config, label_encoding,
                progress=lambda done, total: notify("grid_search", done, total),
            )
        except AdaptomlError as exc:
            fail("grid_search", exc)
        stage("fit")
        try:
            best_model, best_chain = select_best(run.search_result, parts, search_config, label_encoding)
            bundle = persistence.build_bundle(best_model, best_chain, cfg.task, label_encoding)
            run.bundle_path = persistence.save_model(bundle, os.path.join(out_dir, "best_model.json"))
            run.artifacts.append(run.bundle_path)
            if cfg.export_features:
                merged_X = best_chain.transform(parts.train)
                suffix = "csv" if cfg.export_features == "csv" else "amxf"
                path = export_features(
                    merged_X, best_chain.feature_names,
                    os.path.join(out_dir, f"features.{suffix}"), cfg.export_features,
                )
                run.artifacts.append(str(path))
        except AdaptomlError as exc:
            fail("fit", exc)

    # load pre-trained bundles
    if cfg.model_paths:
        stage("load_models")
        try:
            run.loaded = persistence.load_models(cfg.model_paths)
            for loaded in run.loaded:
                if loaded.task != cfg.task:
                    raise DataError(f"{loaded.path}: bundle task '{loaded.task}' != run task '{cfg.task}'")
        except AdaptomlError as exc:
            fail("load_models", exc)

    # the active model drives adaptation/prediction/sessions
    if best_model is not None:
        active_model, active_chain, active_encoding = best_model, best_chain, label_encoding
    elif run.loaded:
        first = run.loaded[0]
        active_model, active_chain, active_encoding = first.model, first.chain, first.label_encoding
    else:
        active_model = active_chain = active_encoding = None

    def incremental_base(purpose: str) -> tuple[Model, PreprocessingChain, Optional[LabelEncoding]]:
        if active_model is not None and active_model.incremental:
            return active_model, active_chain, active_encoding
        if run.search_result is not None:
            fallback = _best_incremental(run.search_result)
            if fallback is None:
                raise DataError("no incremental-capable candidate available")
            model, chain = select_best(
                SearchResult(
                    results=run.search_result.results,
                    best_id=fallback.candidate.candidate_id,
                    criterion=run.search_result.criterion,
                    direction=run.search_result.direction,
                ),
                parts, search_config, label_encoding,
            )
            run.warnings.append(
                f"WARNING: best model family '{active_model.spec.family}' is not incremental; "
                f"{purpose} uses fallback candidate {fallback.candidate.candidate_id} "
                f"({fallback.candidate.family})"
            )
            return model, chain, label_encoding
        raise DataError(
            f"loaded model family '{active_model.spec.family}' does not support incremental updates"
        )

    # per-user adaptation
    if cfg.adapt:
        stage("adapt")
        try:
            base, base_chain, base_encoding = incremental_base("adaptation")
            partitions = partition_by_user(data, cfg.personalization_column)
            run.adaptation = adapt_models(
                base, base_chain, partitions,
                AdaptationConfig(user_train_frac=cfg.user_train_frac, seed=cfg.seed),
                cfg.task, base_encoding,
            )
            for user, reason in run.adaptation.skipped:
                run.warnings.append(f"WARNING: user '{user}' skipped during adaptation: {reason}")
        except AdaptomlError as exc:
            fail("adapt", exc)

    # prediction
    if cfg.predict_path:
        stage("predict")
        try:
            if active_model is None:
                raise DataError("prediction requires a fitted or loaded model")
            run.predictions_path = predict_file(
                active_model, active_chain, active_encoding, cfg, out_dir, run.adaptation
            )
            run.artifacts.append(run.predictions_path)
        except AdaptomlError as exc:
            fail("predict", exc)

    # incremental sessions over the partial-fit file
    if cfg.partial_fit_path:
        stage("sessions")
        try:
            base, base_chain, base_encoding = incremental_base("incremental sessions")
            if cfg.task != "classification":
                raise DataError("session evaluation requires a classification task")
            if parts.test.n_rows == 0:
                raise DataError("incremental sessions need a non-empty test split as the base test set")
            inc_raw = load_csv(cfg.partial_fit_path, cfg.missing_markers)
            person = (
                cfg.personalization_column
                if cfg.personalization_column in inc_raw.schema.names
                else None
            )
            inc = inc_raw.with_target(cfg.label_column, person)
            batches = _session_batches(inc, base_chain, base_encoding, cfg)
            base_test = (base_chain.transform(parts.test), targets(parts.test, cfg.task, base_encoding))
            run.session_report = run_sessions(base, base_test, batches, list(base_encoding.classes))
            run.omega = kemker_metrics(run.session_report)
        except AdaptomlError as exc:
            fail("sessions", exc)

    # reports and plots
    stage("report")
    try:
        _emit_outputs(run, cfg, parts, best_model, best_chain, label_encoding, criterion)
    except AdaptomlError as exc:
        fail("report", exc)
    return run


def _best_incremental(result: SearchResult):
    best = None
    for entry in result.results:
        if entry.error is not None or not family_info(entry.candidate.family).incremental:
            continue
        if best is None or _improves(result.direction, entry.validation_score, best.validation_score):
            best = entry
    return best


def _improves(direction: str, challenger: float, incumbent: float) -> bool:
    return challenger > incumbent if direction == "maximize" else challenger < incumbent


def _session_batches(inc: Dataset, chain: PreprocessingChain, encoding, cfg: PipelineConfig):
    """Split the partial-fit file into S equal sequential batches, each with
    its own seeded train/test split (test carved first, like the main split)."""
    X = chain.transform(inc)
    y = targets(inc, cfg.task, encoding)
    n = inc.n_rows
    if n < cfg.sessions:
        raise DataError(f"partial-fit file has {n} rows, fewer than {cfg.sessions} sessions")
    bounds = [(_round_half_up(n * i / cfg.sessions), _round_half_up(n * (i + 1) / cfg.sessions)) for i in range(cfg.sessions)]
    batches = []
    for s, (lo, hi) in enumerate(bounds):
        size = hi - lo
        if size < 2:
            raise DataError(f"session batch {s + 1} has {size} row(s); need at least 2")
        rng = np.random.default_rng(cfg.seed + s + 1)
        order = lo + rng.permutation(size)
        n_test = max(1, _round_half_up(size * cfg.test_frac))
        if n_test >= size:
            n_test = size - 1
        test_idx, train_idx = order[:n_test], order[n_test:]
        batches.append((X[train_idx], y[train_idx], X[test_idx], y[test_idx]))
    return batches


def predict_file(
    model: Model,
    chain: PreprocessingChain,
    encoding: Optional[LabelEncoding],
    cfg: PipelineConfig,
    out_dir: str,
    adaptation: Optional[AdaptationResult] = None,
) -> str:
    """Write predictions.csv: the input columns plus a predicted-label column.

    When adaptation ran and the input carries the personalization column,
    each row routes to its user's adapted model (base for unknown users) and
    a model_used column records the routing.
    """
    d = load_csv(cfg.predict_path, cfg.missing_markers)
    if d.n_rows == 0:
        raise DataError(f"prediction file '{cfg.predict_path}' has no rows")
    X = chain.transform(d)

    routing = adaptation is not None and cfg.personalization_column in d.schema.names
    model_used = ["base"] * d.n_rows
    predictions = model.predict(X)
    if routing:
        per_values = d.column(cfg.personalization_column)
        by_user: dict[str, list[int]] = {}
        for i, value in enumerate(per_values):
            by_user.setdefault(str(value), []).append(i)
        for user, indices in by_user.items():
            record = adaptation.users.get(user)
            if record is None:
                continue
            user_pred = record.model.predict(X[indices])
            for j, i in enumerate(indices):
                predictions[i] = user_pred[j]
                model_used[i] = user

    predicted_col = f"predicted_{cfg.label_column}"
    header = list(d.schema.names) + [predicted_col] + (["model_used"] if routing else [])
    rows = []
    for i, row in enumerate(d.rows):
        cells = [("" if v is None else fmt(v)) for v in row]
        if cfg.task == "classification":
            cells.append(encoding.decode([int(predictions[i])])[0])
        else:
            cells.append(fmt(float(predictions[i])))
        if routing:
            cells.append(model_used[i])
        rows.append(cells)
    path = os.path.join(out_dir, "predictions.csv")
    reporting._write_csv(path, header, rows)
    return path


def _emit_outputs(run, cfg, parts, best_model, best_chain, label_encoding, criterion):
    if run.search_result is not None:
        run.artifacts.append(reporting.write_results_csv(run.out_dir, run.search_result))
        run.artifacts.extend(reporting.emit_search_plot(run.search_result, run.out_dir))
        if cfg.task == "classification" and parts.test.n_rows > 0 and best_model is not None:
            y_test = targets(parts.test, cfg.task, label_encoding)
            pred = best_model.predict(best_chain.transform(parts.test))
            metrics = reporting.classification_metrics(y_test, pred, range(len(label_encoding.classes)))
            run.artifacts.append(
                reporting.write_classification_report_csv(run.out_dir, metrics, list(label_encoding.classes))
            )
    if run.adaptation is not None:
        run.artifacts.append(reporting.write_adaptation_csv(run.out_dir, run.adaptation))
    if run.session_report is not None:
        run.artifacts.append(reporting.write_sessions_csv(run.out_dir, run.session_report))
        run.artifacts.extend(reporting.emit_session_plots(run.session_report, run.out_dir))
    run.artifacts.append(reporting.write_summary(run.out_dir, _summary_lines(run, cfg, criterion)))


def _summary_lines(run: RunOutputs, cfg: PipelineConfig, criterion: str) -> list[str]:
    lines = [f"task: {cfg.task}", f"data: {cfg.data_path}", f"seed: {cfg.seed}"]
    if run.search_result is not None:
        best = run.search_result.best
        lines.append(
            "best model: "
            f"{best.candidate.family} ({reporting.hyperparams_text(best.candidate.hyperparameters)}) "
            f"normalize={'on' if best.candidate.normalize else 'off'} "
            f"{criterion}[validation]={fmt(best.validation_score)}"
            + (f" {criterion}[test]={fmt(best.test_score)}" if best.test_score is not None else "")
        )
        failed = [r.candidate.candidate_id for r in run.search_result.results if r.error]
        lines.append(
            f"grid search: {len(run.search_result.results)} candidates, "
            f"best_id={run.search_result.best_id}, failed={len(failed)}"
        )
    if run.loaded:
        for loaded in run.loaded:
            lines.append(f"loaded model: {loaded.path} ({loaded.model.spec.family})")
    if run.adaptation is not None:
        lines.append(
            f"adaptation: {len(run.adaptation.users)} user(s) adapted, "
            f"{len(run.adaptation.skipped)} skipped"
        )
    if run.omega is not None:
        lines.append(
            f"sessions: T={run.session_report.n_sessions} "
            f"omega_base={fmt(run.omega.omega_base)} omega_new={fmt(run.omega.omega_new)} "
            f"omega_all={fmt(run.omega.omega_all)} alpha_ideal={fmt(run.omega.alpha_ideal)}"
        )
    if run.predictions_path:
        lines.append(f"predictions: {run.predictions_path}")
    lines.extend(run.warnings)
    lines.append("stages: " + " -> ".join(run.stage_trace))
    return lines
