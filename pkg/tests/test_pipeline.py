import json
import os

import numpy as np
import pytest

from adaptoml.cli import UsageError, main, parse_cli
from adaptoml.errors import ConfigError, PipelineError
from adaptoml.pipeline import PipelineConfig, run_pipeline, validate_config

from conftest import write_csv


def synth_csv(path, n=40, seed=0, users=("u1", "u2"), missing_every=0):
    """Two informative numeric features; label = sign of their sum."""
    rng = np.random.default_rng(seed)
    lines = ["x1,x2,user,y"]
    for i in range(n):
        a, b = rng.normal(1, 1), rng.normal(-1, 1)
        label = "pos" if a + b > 0 else "neg"
        a_txt = "" if missing_every and i % missing_every == 0 else f"{a:.4f}"
        lines.append(f"{a_txt},{b:.4f},{users[i % len(users)]},{label}")
    return write_csv(path, "\n".join(lines) + "\n")


def base_config(data, out, **kw):
    cfg = PipelineConfig(
        data_path=data, label_column="y", personalization_column="user",
        task="classification", families=["gaussian_nb"], out_dir=str(out), seed=11,
    )
    for key, value in kw.items():
        setattr(cfg, key, value)
    return cfg


# --- validation ---------------------------------------------------------------


def test_validate_mandatory_fields():
    with pytest.raises(ConfigError) as err:
        validate_config(PipelineConfig())
    text = str(err.value)
    for field in ("data_path", "label_column", "personalization_column", "task"):
        assert f"{field} required" in text


def test_validate_consistency_rules(tmp_path):
    cfg = base_config("d.csv", tmp_path, fit=False, predict_path="p.csv")
    with pytest.raises(ConfigError, match="requires model_paths"):
        validate_config(cfg)
    cfg.model_paths = ["m.json"]
    validate_config(cfg)


def test_validate_value_errors(tmp_path):
    cfg = base_config("d.csv", tmp_path, task="clustering")
    with pytest.raises(ConfigError, match="classification, regression"):
        validate_config(cfg)
    cfg = base_config("d.csv", tmp_path, impute="sometimes")
    with pytest.raises(ConfigError, match="impute"):
        validate_config(cfg)
    cfg = base_config("d.csv", tmp_path, families=["sgd_regressor"])
    with pytest.raises(ConfigError, match="not a classification family"):
        validate_config(cfg)


# --- run_pipeline -------------------------------------------------------------


def test_minimal_run_emits_core_artifacts(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    run = run_pipeline(base_config(data, tmp_path / "out", families=None))
    names = {os.path.basename(p) for p in run.artifacts}
    assert {"best_model.json", "results.csv", "summary.txt", "classification_report.csv"} <= names
    assert all(os.path.exists(p) for p in run.artifacts)
    assert run.search_result is not None
    # full default classification grid: (1 + 6 + 4 + 3) combos x 2 normalization variants
    assert len(run.search_result.results) == 28


def test_trace_flags_gate_stages(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    run = run_pipeline(base_config(data, tmp_path / "o1"))
    assert run.stage_trace == ["load", "split", "grid_search", "fit", "report"]

    run = run_pipeline(base_config(data, tmp_path / "o2", impute="mean", adapt=True))
    assert "impute" in run.stage_trace and "adapt" in run.stage_trace

    run = run_pipeline(base_config(data, tmp_path / "o3", feature_selection="variance:0.0"))
    assert "feature_select" in run.stage_trace and "feature_extract" not in run.stage_trace


def test_extraction_wins_over_selection(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    run = run_pipeline(base_config(
        data, tmp_path / "out", feature_extraction="auto", feature_selection="top_k:1",
    ))
    assert "feature_extract" in run.stage_trace
    assert "feature_select" not in run.stage_trace
    bundle = json.loads(open(run.bundle_path).read())
    assert bundle["preprocessing"]["feature_stage"]["kind"] == "pca"


def test_predict_only_path_with_loaded_bundle(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    first = run_pipeline(base_config(data, tmp_path / "fit_out"))
    predict_csv = synth_csv(tmp_path / "p.csv", n=10, seed=9)
    cfg = base_config(data, tmp_path / "pred_out", fit=False,
                      model_paths=[first.bundle_path], predict_path=predict_csv)
    run = run_pipeline(cfg)
    assert "grid_search" not in run.stage_trace
    assert "load_models" in run.stage_trace and "predict" in run.stage_trace
    with open(run.predictions_path) as fh:
        lines = fh.read().strip().splitlines()
    assert lines[0] == "x1,x2,user,y,predicted_y"
    assert len(lines) == 11  # header + one row per input row


def test_predictions_memorize_training_rows(tmp_path):
    data = synth_csv(tmp_path / "d.csv", n=20)
    cfg = base_config(data, tmp_path / "out", families=["knn_classifier"],
                      test_frac=0.0, val_frac=0.2, predict_path=data)
    run = run_pipeline(cfg)
    with open(run.predictions_path) as fh:
        rows = [line.split(",") for line in fh.read().strip().splitlines()[1:]]
    for row in rows:
        assert row[4] == row[3]  # k=1 candidate wins and memorizes every row


def test_personalization_routing_and_unknown_user(tmp_path):
    data = synth_csv(tmp_path / "d.csv", n=32)
    predict_csv = synth_csv(tmp_path / "p.csv", n=6, seed=5, users=("u1", "ghost"))
    cfg = base_config(data, tmp_path / "out", adapt=True, predict_path=predict_csv)
    run = run_pipeline(cfg)
    with open(run.predictions_path) as fh:
        header, *rows = [line.split(",") for line in fh.read().strip().splitlines()]
    assert header[-1] == "model_used"
    used = {row[2]: row[-1] for row in rows}
    assert used["ghost"] == "base"
    assert used["u1"] == "u1"


def test_sessions_emit_reports_and_plots(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    inc = synth_csv(tmp_path / "inc.csv", n=40, seed=3)
    run = run_pipeline(base_config(data, tmp_path / "out", partial_fit_path=inc, sessions=4))
    names = {os.path.basename(p) for p in run.artifacts}
    assert "sessions.csv" in names
    assert sum(1 for n in names if n.startswith("incremental_") and n.endswith(".svg")) == 6
    assert run.session_report.n_sessions == 4
    assert run.omega is not None


def test_non_incremental_best_falls_back_for_adaptation(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    cfg = base_config(data, tmp_path / "out", families=["decision_tree", "gaussian_nb"], adapt=True)
    run = run_pipeline(cfg)
    if run.search_result.best.candidate.family == "decision_tree":
        assert any("not incremental" in w for w in run.warnings)
    assert run.adaptation is not None


def test_signature_never_contains_personalization_column(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    run = run_pipeline(base_config(data, tmp_path / "out"))
    bundle = json.loads(open(run.bundle_path).read())
    assert all("user" != name for name in bundle["feature_signature"])


def test_stage_errors_are_tagged(tmp_path):
    cfg = base_config(str(tmp_path / "missing.csv"), tmp_path / "out")
    with pytest.raises(PipelineError, match="stage 'load' failed"):
        run_pipeline(cfg)
    data = synth_csv(tmp_path / "d.csv", missing_every=5)
    with pytest.raises(PipelineError, match="stage 'grid_search' failed"):
        run_pipeline(base_config(data, tmp_path / "out2"))  # missing cells, no imputation


def test_determinism_byte_identical_outputs(tmp_path):
    data = synth_csv(tmp_path / "d.csv")
    inc = synth_csv(tmp_path / "inc.csv", n=24, seed=2)
    runs = []
    for sub in ("a", "b"):
        runs.append(run_pipeline(base_config(data, tmp_path / sub, partial_fit_path=inc, sessions=2)))
    for name in ("results.csv", "sessions.csv", "incremental_accuracy.svg", "summary.txt"):
        a = open(os.path.join(runs[0].out_dir, name), "rb").read()
        b = open(os.path.join(runs[1].out_dir, name), "rb").read()
        assert a == b, name


def test_regression_task_end_to_end(tmp_path):
    rng = np.random.default_rng(4)
    lines = ["x1,user,y"]
    for i in range(30):
        x = rng.uniform(-2, 2)
        lines.append(f"{x:.4f},u{i % 2},{3 * x + rng.normal(0, 0.1):.4f}")
    data = write_csv(tmp_path / "r.csv", "\n".join(lines) + "\n")
    cfg = PipelineConfig(
        data_path=data, label_column="y", personalization_column="user",
        task="regression", out_dir=str(tmp_path / "out"), seed=5,
    )
    run = run_pipeline(cfg)
    assert run.search_result.direction == "minimize"
    assert run.bundle_path is not None


# --- CLI ------------------------------------------------------------------------


def test_parse_cli_minimal_defaults():
    cfg = parse_cli(["--data", "d.csv", "--label-col", "y", "--person-col", "user",
                     "--task", "classification"])
    assert cfg.test_frac == 0.2 and cfg.val_frac == 0.2
    assert cfg.fit is True and cfg.seed == 42
    assert cfg.sessions == 4 and cfg.families is None


def test_parse_cli_missing_mandatory_flag():
    with pytest.raises(UsageError, match="--label-col"):
        parse_cli(["--data", "d.csv", "--person-col", "u", "--task", "classification"])


def test_parse_cli_bad_task_lists_choices():
    with pytest.raises(UsageError, match="classification.*regression"):
        parse_cli(["--data", "d.csv", "--label-col", "y", "--person-col", "u",
                   "--task", "clustering"])


def test_parse_cli_full_surface():
    cfg = parse_cli([
        "--data", "d.csv", "--label-col", "y", "--person-col", "u", "--task", "classification",
        "--impute", "median", "--test-size", "0.3", "--val-size", "0.1", "--normalize", "on",
        "--feature-extraction", "2", "--models", "gaussian_nb,knn_classifier",
        "--criterion", "accuracy", "--predict", "p.csv", "--partial-fit", "i.csv",
        "--sessions", "3", "--adapt", "--load-model", "m1.json", "--load-model", "m2.json",
        "--out", "o", "--seed", "7", "--export-features", "csv", "--stratify",
        "--missing-markers", ",NA,?",
    ])
    assert cfg.impute == "median" and cfg.normalize == "on"
    assert cfg.feature_extraction == 2
    assert cfg.families == ["gaussian_nb", "knn_classifier"]
    assert cfg.model_paths == ["m1.json", "m2.json"]
    assert cfg.missing_markers == ["", "NA", "?"]
    assert cfg.stratify is True


def test_cli_exit_codes(tmp_path, capsys):
    data = synth_csv(tmp_path / "d.csv", n=16)
    ok = main(["--data", data, "--label-col", "y", "--person-col", "user",
               "--task", "classification", "--models", "gaussian_nb",
               "--out", str(tmp_path / "out")])
    assert ok == 0
    assert main(["--data", data]) == 1  # usage: missing mandatory flags
    missing = main(["--data", str(tmp_path / "nope.csv"), "--label-col", "y",
                    "--person-col", "user", "--task", "classification"])
    assert missing == 2  # runtime: unreadable file
    err = capsys.readouterr().err
    assert "usage error" in err and "stage 'load' failed" in err
