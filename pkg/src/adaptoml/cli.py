"""Command-line front-end. Exit codes: 0 success, 1 usage error, 2 runtime error."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .dataset import DEFAULT_MISSING_MARKERS
from .errors import AdaptomlError, ConfigError
from .pipeline import PipelineConfig, run_pipeline, validate_config

# Single source for parameter hints, shared with the HTTP service (and through
# it with the browser UI's hover help).
PARAM_DOCS = {
    "data": "Path of the dataset CSV file (header row required).",
    "label-col": "Name of the labels column.",
    "person-col": "Name of the personalization (user) column; excluded from features.",
    "task": "classification or regression; selects which half of the model zoo is searched.",
    "impute": "Missing-value policy: mean, median, most_frequent, constant:<value> or none.",
    "test-size": "Fraction of rows carved out first as the test split.",
    "val-size": "Fraction of the remaining rows used for validation-based model selection.",
    "normalize": "Force z-score normalization on or off; omit to grid-search both variants.",
    "missing-markers": "Comma-separated cell tokens treated as missing.",
    "stratify": "Preserve class proportions in the train/validation/test split.",
    "feature-selection": "Supervised selection policy: variance:<threshold> or top_k:<k>.",
    "feature-extraction": "PCA extraction with the given component count (or auto). Wins over selection.",
    "export-features": "Also write the processed training features as csv or bundle.",
    "models": "Comma-separated model families to search; defaults to every task-compatible family.",
    "criterion": "Assessment criterion ranking candidates: macro_f1/accuracy or rmse/mae/r2.",
    "no-fit": "Skip grid search and fitting (requires --load-model for downstream steps).",
    "predict": "Path of a CSV to predict; writes predictions.csv.",
    "partial-fit": "Path of a CSV consumed as incremental-learning sessions.",
    "sessions": "Number of sequential batches the partial-fit file is split into.",
    "adapt": "Clone and fine-tune the model per personalization-column user.",
    "user-train-frac": "Fraction of each user's rows used for adaptation fine-tuning.",
    "load-model": "Path of a saved model bundle; repeatable.",
    "out": "Output directory (default ./adaptoml_out/<timestamp>).",
    "seed": "Seed for every randomized step; fixes the whole run byte-for-byte.",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); the contract wants 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="adaptoml",
        description="Adaptive AutoML: automated imputation, feature engineering, "
        "grid search, per-user adaptation and incremental learning for tabular CSV data.",
    )
    parser.add_argument("--data", required=True, help=PARAM_DOCS["data"])
    parser.add_argument("--label-col", required=True, help=PARAM_DOCS["label-col"])
    parser.add_argument("--person-col", required=True, help=PARAM_DOCS["person-col"])
    parser.add_argument("--task", required=True, choices=("classification", "regression"),
                        help=PARAM_DOCS["task"])

    pre = parser.add_argument_group("data preprocessing section")
    pre.add_argument("--impute", metavar="POLICY", help=PARAM_DOCS["impute"])
    pre.add_argument("--test-size", type=float, default=0.2, metavar="FRAC", help=PARAM_DOCS["test-size"])
    pre.add_argument("--val-size", type=float, default=0.2, metavar="FRAC", help=PARAM_DOCS["val-size"])
    pre.add_argument("--normalize", nargs="?", const="on", choices=("on", "off"),
                     help=PARAM_DOCS["normalize"])
    pre.add_argument("--missing-markers", metavar="TOKENS", help=PARAM_DOCS["missing-markers"])
    pre.add_argument("--stratify", action="store_true", help=PARAM_DOCS["stratify"])

    feats = parser.add_argument_group("feature engineering section")
    feats.add_argument("--feature-selection", nargs="?", const="variance:0.0", metavar="POLICY",
                       help=PARAM_DOCS["feature-selection"])
    feats.add_argument("--feature-extraction", nargs="?", const="auto", metavar="K",
                       help=PARAM_DOCS["feature-extraction"])
    feats.add_argument("--export-features", choices=("csv", "bundle"), help=PARAM_DOCS["export-features"])

    models = parser.add_argument_group("classifiers and regressors section")
    models.add_argument("--models", metavar="FAMILIES", help=PARAM_DOCS["models"])
    models.add_argument("--criterion", help=PARAM_DOCS["criterion"])
    models.add_argument("--no-fit", action="store_true", help=PARAM_DOCS["no-fit"])
    models.add_argument("--predict", metavar="PATH", help=PARAM_DOCS["predict"])
    models.add_argument("--partial-fit", metavar="PATH", help=PARAM_DOCS["partial-fit"])
    models.add_argument("--sessions", type=int, default=4, help=PARAM_DOCS["sessions"])
    models.add_argument("--adapt", action="store_true", help=PARAM_DOCS["adapt"])
    models.add_argument("--user-train-frac", type=float, default=0.5, metavar="FRAC",
                        help=PARAM_DOCS["user-train-frac"])
    models.add_argument("--load-model", action="append", default=[], metavar="PATH",
                        help=PARAM_DOCS["load-model"])

    parser.add_argument("--out", metavar="DIR", help=PARAM_DOCS["out"])
    parser.add_argument("--seed", type=int, default=42, help=PARAM_DOCS["seed"])
    return parser


def parse_cli(argv: Sequence[str]) -> PipelineConfig:
    """Map CLI flags onto a validated PipelineConfig."""
    ns = build_parser().parse_args(list(argv))
    extraction = ns.feature_extraction
    if extraction is not None and extraction != "auto":
        try:
            extraction = int(extraction)
        except ValueError:
            raise UsageError(f"--feature-extraction expects a component count or 'auto', got '{extraction}'")
    cfg = PipelineConfig(
        data_path=ns.data,
        label_column=ns.label_col,
        personalization_column=ns.person_col,
        task=ns.task,
        impute=ns.impute,
        test_frac=ns.test_size,
        val_frac=ns.val_size,
        normalize=ns.normalize,
        feature_extraction=extraction,
        feature_selection=ns.feature_selection,
        families=[f.strip() for f in ns.models.split(",") if f.strip()] if ns.models else None,
        criterion=ns.criterion,
        fit=not ns.no_fit,
        predict_path=ns.predict,
        partial_fit_path=ns.partial_fit,
        sessions=ns.sessions,
        adapt=ns.adapt,
        model_paths=list(ns.load_model),
        out_dir=ns.out,
        seed=ns.seed,
        export_features=ns.export_features,
        stratify=ns.stratify,
        missing_markers=(
            ns.missing_markers.split(",") if ns.missing_markers is not None
            else list(DEFAULT_MISSING_MARKERS)
        ),
        user_train_frac=ns.user_train_frac,
    )
    try:
        validate_config(cfg)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_cli(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        run = run_pipeline(cfg)
    except AdaptomlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for warning in run.warnings:
        print(warning, file=sys.stderr)
    print(f"outputs written to {run.out_dir}")
    for path in run.artifacts:
        print(f"  {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
