#!/usr/bin/env python3
"""Regenerate the config-fidelity fixture corpus.

Each fixture pairs a UI form state with the CLI flag list it is equivalent
to; the expected config document is computed by the CLI parser itself, so the
UI test asserts field-by-field equality against the real contract.

Usage: python3 scripts/gen_fixtures.py   (from frontend/)
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "src"))

from adaptoml.cli import parse_cli  # noqa: E402


def form(**overrides):
    state = {
        "datasetRef": None,
        "labelColumn": "",
        "personColumn": "",
        "task": "",
        "impute": "",
        "imputeConstant": "",
        "testSize": 0.2,
        "valSize": 0.2,
        "normalize": "",
        "stratify": False,
        "missingMarkers": "",
        "featureMode": "",
        "selectionMethod": "variance",
        "selectionValue": "0.0",
        "extractionK": "",
        "exportFeatures": "",
        "families": [],
        "criterion": "",
        "fit": True,
        "predictPath": None,
        "partialFitPath": None,
        "sessions": 4,
        "adapt": False,
        "userTrainFrac": 0.5,
        "modelPaths": [],
        "seed": 42,
    }
    state.update(overrides)
    return state


MANDATORY = ["--data", "d.csv", "--label-col", "y", "--person-col", "user"]

FIXTURES = [
    (
        "minimal classification",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification"),
        MANDATORY + ["--task", "classification"],
    ),
    (
        "minimal regression",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="regression"),
        MANDATORY + ["--task", "regression"],
    ),
    (
        "mean imputation with forced normalization",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             impute="mean", normalize="on"),
        MANDATORY + ["--task", "classification", "--impute", "mean", "--normalize", "on"],
    ),
    (
        "constant imputation and custom split sizes",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             impute="constant", imputeConstant="0", testSize=0.3, valSize=0.1),
        MANDATORY + ["--task", "classification", "--impute", "constant:0",
                     "--test-size", "0.3", "--val-size", "0.1"],
    ),
    (
        "top-k feature selection with csv export",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             featureMode="selection", selectionMethod="top_k", selectionValue="2",
             exportFeatures="csv"),
        MANDATORY + ["--task", "classification", "--feature-selection", "top_k:2",
                     "--export-features", "csv"],
    ),
    (
        "pca extraction with explicit component count",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             featureMode="extraction", extractionK="3"),
        MANDATORY + ["--task", "classification", "--feature-extraction", "3"],
    ),
    (
        "pca extraction auto plus accuracy criterion",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             featureMode="extraction", criterion="accuracy"),
        MANDATORY + ["--task", "classification", "--feature-extraction", "--criterion", "accuracy"],
    ),
    (
        "family subset and custom seed",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             families=["gaussian_nb", "knn_classifier"], seed=7),
        MANDATORY + ["--task", "classification", "--models", "gaussian_nb,knn_classifier",
                     "--seed", "7"],
    ),
    (
        "predict-only with loaded model and adaptation",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             fit=False, modelPaths=["m.json"], predictPath="p.csv", adapt=True,
             userTrainFrac=0.25),
        MANDATORY + ["--task", "classification", "--no-fit", "--load-model", "m.json",
                     "--predict", "p.csv", "--adapt", "--user-train-frac", "0.25"],
    ),
    (
        "incremental sessions with stratified split and custom markers",
        form(datasetRef="d.csv", labelColumn="y", personColumn="user", task="classification",
             partialFitPath="inc.csv", sessions=2, stratify=True, normalize="off",
             missingMarkers=",NA,?"),
        MANDATORY + ["--task", "classification", "--partial-fit", "inc.csv", "--sessions", "2",
                     "--stratify", "--normalize", "off", "--missing-markers", ",NA,?"],
    ),
]


def main():
    out = []
    for name, form_state, argv in FIXTURES:
        expected = parse_cli(argv).to_dict()
        out.append({"name": name, "form": form_state, "argv": argv, "expected": expected})
    target = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "config_fidelity.json")
    os.makedirs(os.path.dirname(target), exist_ok=True)
    with open(target, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(out)} fixtures to {os.path.relpath(target)}")


if __name__ == "__main__":
    main()
