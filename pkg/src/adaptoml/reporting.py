"""Classification/regression metrics plus CSV, text and SVG report emission."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ClassMetrics:
    classes: tuple
    confusion: np.ndarray  # (K, K), rows = true, cols = predicted
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    zero_division_events: int

    @property
    def n_samples(self) -> int:
        return int(self.support.sum())


def _safe_div(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, int]:
    zero = den == 0
    out = np.where(zero, 0.0, num / np.where(zero, 1.0, den))  # 0/0 -> 0 convention
    return out, int(zero.sum())


def classification_metrics(y_true, y_pred, classes: Sequence) -> ClassMetrics:
    """Confusion-matrix metrics over the declared class list.

    Zero-denominator precision/recall/F1 follow the 0/0 -> 0 convention and
    are counted in zero_division_events.
    """
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred):
        raise DataError(f"y_true has {len(y_true)} entries, y_pred has {len(y_pred)}")
    if not y_true:
        raise DataError("metrics need at least one sample")
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    confusion = np.zeros((k, k), dtype=int)
    for t, p in zip(y_true, y_pred):
        if t not in index or p not in index:
            unknown = t if t not in index else p
            raise DataError(f"value {unknown!r} is not in the class list")
        confusion[index[t], index[p]] += 1
    tp = np.diag(confusion).astype(float)
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    precision, zd_p = _safe_div(tp, predicted.astype(float))
    recall, zd_r = _safe_div(tp, support.astype(float))
    f1, zd_f = _safe_div(2 * precision * recall, precision + recall)
    n = len(y_true)
    weights = support / n
    return ClassMetrics(
        classes=classes,
        confusion=confusion,
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        accuracy=float(tp.sum() / n),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        weighted_precision=float((weights * precision).sum()),
        weighted_recall=float((weights * recall).sum()),
        weighted_f1=float((weights * f1).sum()),
        zero_division_events=zd_p + zd_r + zd_f,
    )


@dataclass(frozen=True)
class RegMetrics:
    rmse: float
    mae: float
    r2: Optional[float]  # None when y_true is constant (variance undefined)


def regression_metrics(y_true, y_pred) -> RegMetrics:
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape:
        raise DataError(f"y_true shape {y_true.shape} != y_pred shape {y_pred.shape}")
    if y_true.size == 0:
        raise DataError("metrics need at least one sample")
    err = y_pred - y_true
    rmse = float(np.sqrt((err ** 2).mean()))
    mae = float(np.abs(err).mean())
    sst = float(((y_true - y_true.mean()) ** 2).sum())
    r2 = None if sst == 0.0 or y_true.size < 2 else float(1.0 - (err ** 2).sum() / sst)
    return RegMetrics(rmse=rmse, mae=mae, r2=r2)


# --- assessment criteria --------------------------------------------------

CLASSIFICATION_CRITERIA = {"macro_f1": "maximize", "accuracy": "maximize"}
REGRESSION_CRITERIA = {"rmse": "minimize", "mae": "minimize", "r2": "maximize"}


def default_criterion(task: str) -> str:
    return "macro_f1" if task == "classification" else "rmse"


def criterion_direction(criterion: str) -> str:
    merged = {**CLASSIFICATION_CRITERIA, **REGRESSION_CRITERIA}
    if criterion not in merged:
        raise DataError(f"unknown criterion '{criterion}' (choose from {', '.join(merged)})")
    return merged[criterion]


def score(task: str, criterion: str, y_true, y_pred, classes: Sequence = ()) -> float:
    if task == "classification":
        m = classification_metrics(y_true, y_pred, classes)
        return {"macro_f1": m.macro_f1, "accuracy": m.accuracy}[criterion]
    m = regression_metrics(y_true, y_pred)
    value = {"rmse": m.rmse, "mae": m.mae, "r2": m.r2}[criterion]
    if value is None:
        raise DataError("criterion r2 undefined: target values are constant")
    return value


def metric_rows(task: str, y_true, y_pred, classes: Sequence = ()) -> list[tuple[str, float]]:
    """The per-split metric set written to results.csv."""
    if task == "classification":
        m = classification_metrics(y_true, y_pred, classes)
        return [
            ("accuracy", m.accuracy),
            ("macro_precision", m.macro_precision),
            ("macro_recall", m.macro_recall),
            ("macro_f1", m.macro_f1),
        ]
    m = regression_metrics(y_true, y_pred)
    rows = [("rmse", m.rmse), ("mae", m.mae)]
    if m.r2 is not None:
        rows.append(("r2", m.r2))
    return rows


# --- CSV / text emission ---------------------------------------------------


def fmt(value) -> str:
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, np.floating):
        return repr(float(value))
    return str(value)


def _write_csv(path, header: Sequence[str], rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(header))
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise DataError(f"cannot write '{path}': {exc.strerror or exc}") from exc
    return path


def hyperparams_text(params: dict) -> str:
    """Canonical key=value text, keys sorted, stable across runs."""
    return ";".join(f"{k}={fmt(v)}" for k, v in sorted(params.items())) or "-"


def write_results_csv(out_dir, search_result) -> str:
    rows = []
    for entry in search_result.results:
        cand = entry.candidate
        prefix = (cand.candidate_id, cand.family, hyperparams_text(cand.hyperparameters))
        if entry.error is not None:
            rows.append((*prefix, "validation", "error", entry.error))
            continue
        for split_name, metrics in (("validation", entry.validation_metrics), ("test", entry.test_metrics)):
            for metric, value in metrics:
                rows.append((*prefix, split_name, metric, value))
    path = os.path.join(out_dir, "results.csv")
    return _write_csv(path, ("candidate_id", "family", "hyperparams", "split", "metric", "value"), rows)


def write_classification_report_csv(out_dir, metrics: ClassMetrics, labels: Sequence[str]) -> str:
    rows = []
    for i, label in enumerate(labels):
        rows.append((label, metrics.precision[i], metrics.recall[i], metrics.f1[i], metrics.support[i]))
    n = metrics.n_samples
    rows.append(("macro avg", metrics.macro_precision, metrics.macro_recall, metrics.macro_f1, n))
    rows.append(("weighted avg", metrics.weighted_precision, metrics.weighted_recall, metrics.weighted_f1, n))
    rows.append(("accuracy", "", "", metrics.accuracy, n))
    path = os.path.join(out_dir, "classification_report.csv")
    return _write_csv(path, ("label", "precision", "recall", "f1", "support"), rows)


def write_adaptation_csv(out_dir, adaptation) -> str:
    rows = []
    for user_id in sorted(adaptation.users):
        record = adaptation.users[user_id]
        for stage, metrics in (("base", record.before), ("adapted", record.after)):
            for metric, value in metrics:
                rows.append((user_id, stage, metric, value))
    path = os.path.join(out_dir, "adaptation.csv")
    return _write_csv(path, ("user_id", "stage", "metric", "value"), rows)


def write_sessions_csv(out_dir, report) -> str:
    rows = []
    for entry in report.sessions:
        for checkpoint in ("base", "new", "cumulative"):
            m = entry.checkpoints[checkpoint]
            rows.append((entry.session, checkpoint, "accuracy", m.accuracy))
            rows.append((entry.session, checkpoint, "support", m.n_samples))
            for agg in ("precision", "recall", "f1"):
                rows.append((entry.session, checkpoint, agg, getattr(m, f"macro_{agg}")))
            for i, label in enumerate(report.class_labels):
                rows.append((entry.session, checkpoint, f"precision_{label}", m.precision[i]))
                rows.append((entry.session, checkpoint, f"recall_{label}", m.recall[i]))
                rows.append((entry.session, checkpoint, f"f1_{label}", m.f1[i]))
                rows.append((entry.session, checkpoint, f"support_{label}", m.support[i]))
        rows.append((entry.session, "base", "kemker_loss", report.kemker_loss[entry.session]))
    path = os.path.join(out_dir, "sessions.csv")
    return _write_csv(path, ("session", "checkpoint", "metric", "value"), rows)


def write_summary(out_dir, lines: Sequence[str]) -> str:
    path = os.path.join(out_dir, "summary.txt")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write '{path}': {exc.strerror or exc}") from exc
    return path


# --- SVG plots --------------------------------------------------------------

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

_W, _H = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 150, 40, 60


def _svg_line_chart(title: str, x_labels: Sequence[str], series: Sequence[tuple[str, Sequence[float]]],
                    y_label: str) -> str:
    """Deterministic fixed-size line chart: one polyline per series."""
    plot_w = _W - _MARGIN_L - _MARGIN_R
    plot_h = _H - _MARGIN_T - _MARGIN_B
    values = [v for _, ys in series for v in ys]
    y_max = max(max(values), 1e-12) if values else 1.0
    y_min = min(min(values), 0.0) if values else 0.0
    span = y_max - y_min or 1.0

    def sx(i: int) -> float:
        if len(x_labels) == 1:
            return _MARGIN_L + plot_w / 2
        return _MARGIN_L + plot_w * i / (len(x_labels) - 1)

    def sy(v: float) -> float:
        return _MARGIN_T + plot_h * (1 - (v - y_min) / span)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" y2="{_H - _MARGIN_B}" stroke="black"/>',
        f'<line x1="{_MARGIN_L}" y1="{_H - _MARGIN_B}" x2="{_W - _MARGIN_R}" y2="{_H - _MARGIN_B}" stroke="black"/>',
        f'<text x="{_MARGIN_L + plot_w // 2}" y="{_H - 16}" text-anchor="middle" font-size="12">{escape(y_label)}</text>',
        f'<text x="20" y="{_MARGIN_T + plot_h // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 20 {_MARGIN_T + plot_h // 2})">value</text>',
    ]
    for tick in (y_min, (y_min + y_max) / 2, y_max):
        y = sy(tick)
        parts.append(f'<line x1="{_MARGIN_L - 4}" y1="{y:.2f}" x2="{_MARGIN_L}" y2="{y:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="10">{tick:.3g}</text>'
        )
    for i, label in enumerate(x_labels):
        x = sx(i)
        parts.append(f'<line x1="{x:.2f}" y1="{_H - _MARGIN_B}" x2="{x:.2f}" y2="{_H - _MARGIN_B + 4}" stroke="black"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{_H - _MARGIN_B + 18}" text-anchor="middle" font-size="10">{escape(str(label))}</text>'
        )
    for s, (name, ys) in enumerate(series):
        color = _PALETTE[s % len(_PALETTE)]
        pts = [(sx(i), sy(v)) for i, v in enumerate(ys)]
        if len(pts) == 1:  # keep single-point series visible as a degenerate segment
            pts = [pts[0], (pts[0][0] + 0.01, pts[0][1])]
        coord_text = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coord_text}"/>')
        ly = _MARGIN_T + 16 * s
        lx = _W - _MARGIN_R + 10
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 24}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


SESSION_PLOT_METRICS = ("precision", "recall", "f1", "support", "accuracy", "kemker_loss")


def emit_session_plots(report, out_dir) -> list[str]:
    """Six incremental_<metric>.svg files, one polyline per session.

    Per-class metrics plot the cumulative-checkpoint value per class; scalar
    metrics (accuracy, kemker loss) plot as flat lines over the same axis.
    """
    labels = list(report.class_labels)
    paths = []
    for metric in SESSION_PLOT_METRICS:
        series = []
        for entry in report.sessions:
            name = "base" if entry.session == 0 else f"session {entry.session}"
            m = entry.checkpoints["cumulative"]
            if metric in ("precision", "recall", "f1"):
                ys = [float(v) for v in getattr(m, metric)]
            elif metric == "support":
                ys = [float(v) for v in m.support]
            elif metric == "accuracy":
                ys = [m.accuracy] * len(labels)
            else:  # kemker_loss
                ys = [report.kemker_loss[entry.session]] * len(labels)
            series.append((name, ys))
        svg = _svg_line_chart(f"incremental {metric.replace('_', ' ')}", labels, series, "class")
        path = os.path.join(out_dir, f"incremental_{metric}.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
        paths.append(path)
    return paths


def emit_search_plot(search_result, out_dir) -> list[str]:
    ids, scores = [], []
    for entry in search_result.results:
        if entry.error is None:
            ids.append(str(entry.candidate.candidate_id))
            scores.append(entry.validation_score)
    if not ids:
        return []
    svg = _svg_line_chart(
        f"validation {search_result.criterion} by candidate",
        ids,
        [(search_result.criterion, scores)],
        "candidate",
    )
    path = os.path.join(out_dir, "search_validation_scores.svg")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return [path]


def emit_plots(out_dir, session_report=None, search_result=None) -> list[str]:
    """SVG emission entry point; deterministic byte output for fixed inputs."""
    paths = []
    if search_result is not None:
        paths.extend(emit_search_plot(search_result, out_dir))
    if session_report is not None:
        paths.extend(emit_session_plots(session_report, out_dir))
    return paths
