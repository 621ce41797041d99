"""Per-user model personalization, session-based incremental learning, forgetting metrics.

Adaptation clones the shared base model and fine-tunes the clone on one
user's rows via partial_fit, so the base model is never mutated. Session
evaluation tracks accuracy on the base test set, each session's own test set
and the cumulative test set; the omega aggregates normalize those accuracy
curves by an ideal (offline) accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .chain import PreprocessingChain, targets
from .dataset import Dataset, LabelEncoding, split as split_dataset
from .errors import CapabilityError, DataError
from .models import Model
from .reporting import ClassMetrics, classification_metrics, metric_rows, regression_metrics


def partition_by_user(d: Dataset, per_col: str) -> dict[str, Dataset]:
    """Partition rows by personalization value, keyed in first-appearance order.

    Partitions keep the full schema; the personalization column is excluded
    from feature matrices by the feature encoder, not here.
    """
    if per_col not in d.schema.names:
        raise DataError(f"personalization column '{per_col}' not found")
    if per_col == d.schema.label_column:
        raise DataError("personalization column must differ from the label column")
    j = d.schema.index_of(per_col)
    groups: dict[str, list[int]] = {}
    for i, row in enumerate(d.rows):
        token = row[j] if row[j] is None else str(row[j])
        groups.setdefault(token, []).append(i)
    return {user: d.subset(indices) for user, indices in groups.items()}


@dataclass(frozen=True)
class AdaptationConfig:
    user_train_frac: float = 0.5
    seed: int = 42


@dataclass
class UserAdaptation:
    model: Model
    before: list  # metric rows on the user's test rows, base model
    after: list  # metric rows on the user's test rows, adapted model
    n_train: int
    n_test: int


@dataclass
class AdaptationResult:
    users: dict[str, UserAdaptation]
    skipped: list[tuple[str, str]]
    config: AdaptationConfig


def adapt_models(
    base: Model,
    chain: PreprocessingChain,
    partitions: dict[str, Dataset],
    config: AdaptationConfig,
    task: str,
    label_encoding: Optional[LabelEncoding] = None,
) -> AdaptationResult:
    """Fine-tune a clone of ``base`` per user and report before/after metrics.

    Each user's rows are split (seeded, stratified by label for
    classification when feasible) into adaptation-train and evaluation rows.
    Users with fewer than 2 rows are skipped with a warning record.
    """
    if not base.fitted:
        raise DataError("base model must be fitted before adaptation")
    if not base.incremental:
        raise CapabilityError(
            f"family '{base.spec.family}' cannot be adapted incrementally"
        )
    classes = range(len(label_encoding.classes)) if label_encoding else ()
    users: dict[str, UserAdaptation] = {}
    skipped: list[tuple[str, str]] = []
    for user, rows in partitions.items():
        if rows.n_rows < 2:
            skipped.append((user, f"only {rows.n_rows} row(s); cannot split"))
            continue
        if config.user_train_frac == 0.0:
            user_train, user_test = rows.subset([]), rows  # evaluate only, no update
        else:
            test_frac = 1.0 - config.user_train_frac
            stratify = task == "classification" and _stratifiable(rows)
            try:
                parts = split_dataset(rows, test_frac=test_frac, val_frac=0.0, seed=config.seed, stratify=stratify)
            except DataError as exc:
                skipped.append((user, str(exc)))
                continue
            user_train, user_test = parts.train, parts.test
        y_test = targets(user_test, task, label_encoding) if user_test.n_rows else np.array([])
        if user_test.n_rows == 0:
            skipped.append((user, "user test split is empty"))
            continue
        X_test = chain.transform(user_test)
        before = metric_rows(task, y_test, base.predict(X_test), classes)
        adapted = base.clone()
        if user_train.n_rows > 0:
            adapted.partial_fit(chain.transform(user_train), targets(user_train, task, label_encoding))
        after = metric_rows(task, y_test, adapted.predict(X_test), classes)
        users[user] = UserAdaptation(
            model=adapted, before=before, after=after,
            n_train=user_train.n_rows, n_test=user_test.n_rows,
        )
    return AdaptationResult(users=users, skipped=skipped, config=config)


def _stratifiable(d: Dataset) -> bool:
    tokens = d.label_tokens()
    return all(tokens.count(t) >= 2 for t in set(tokens))


# --- session-based batch incremental learning ------------------------------


@dataclass
class SessionEntry:
    session: int
    checkpoints: dict[str, ClassMetrics]  # base / new / cumulative

    @property
    def alpha_base(self) -> float:
        return self.checkpoints["base"].accuracy

    @property
    def alpha_new(self) -> float:
        return self.checkpoints["new"].accuracy

    @property
    def alpha_all(self) -> float:
        return self.checkpoints["cumulative"].accuracy


@dataclass
class SessionReport:
    sessions: list[SessionEntry]
    class_labels: tuple[str, ...]
    kemker_loss: list[float] = field(default_factory=list)
    alpha_ideal: Optional[float] = None

    @property
    def n_sessions(self) -> int:
        return len(self.sessions) - 1  # entry 0 is the base model


@dataclass(frozen=True)
class OmegaMetrics:
    omega_base: float
    omega_new: float
    omega_all: float
    alpha_ideal: float
    kemker_loss: tuple[float, ...]


def run_sessions(
    base_model: Model,
    base_test: tuple[np.ndarray, np.ndarray],
    session_batches: Sequence[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]],
    class_labels: Sequence[str],
) -> SessionReport:
    """Evaluate batch incremental learning over T sessions plus the base model.

    Each batch is (X_train, y_train, X_test, y_test). Session i applies
    partial_fit with batch i's train rows to the running model, then records
    the full metric set on the base test set, the session's own test set and
    the cumulative test set. The supplied base model is never mutated.
    """
    if not session_batches:
        raise DataError("session evaluation requires at least one batch")
    if not base_model.incremental:
        raise CapabilityError(
            f"family '{base_model.spec.family}' does not support incremental sessions"
        )
    if base_model.task != "classification":
        raise DataError("session evaluation is defined for classification models")
    class_indices = list(range(len(class_labels)))
    Xb, yb = base_test
    if len(yb) == 0:
        raise DataError("base test set is empty")

    def evaluate(model: Model, X, y) -> ClassMetrics:
        return classification_metrics(y, model.predict(X), class_indices)

    model = base_model.clone()
    base_metrics = evaluate(model, Xb, yb)
    entries = [SessionEntry(session=0, checkpoints={
        "base": base_metrics, "new": base_metrics, "cumulative": base_metrics,
    })]
    cum_X, cum_y = [Xb], [yb]
    for i, (X_train, y_train, X_test, y_test) in enumerate(session_batches, start=1):
        if len(y_train) == 0 or len(y_test) == 0:
            raise DataError(f"session {i} has an empty train or test batch")
        model.partial_fit(X_train, y_train)
        cum_X.append(X_test)
        cum_y.append(y_test)
        entries.append(SessionEntry(session=i, checkpoints={
            "base": evaluate(model, Xb, yb),
            "new": evaluate(model, X_test, y_test),
            "cumulative": evaluate(model, np.vstack(cum_X), np.concatenate(cum_y)),
        }))
    return SessionReport(sessions=entries, class_labels=tuple(str(c) for c in class_labels))


def kemker_metrics(report: SessionReport, alpha_ideal: Optional[float] = None) -> OmegaMetrics:
    """Aggregate retention scores over sessions 1..T, normalized by alpha_ideal.

    omega_base averages base-test accuracy ratios, omega_new averages raw
    new-session accuracies, omega_all averages cumulative-test ratios.
    kemker_loss_i = 1 - alpha_base_i / alpha_ideal, recorded per session
    (session 0 included). alpha_ideal defaults to the base model's own
    base-test accuracy.
    """
    if report.n_sessions < 1:
        raise DataError("omega metrics require at least one session after the base model")
    if alpha_ideal is None:
        alpha_ideal = report.sessions[0].alpha_base
    if not (alpha_ideal > 0):
        raise DataError(f"alpha_ideal must be positive, got {alpha_ideal}")
    tail = report.sessions[1:]
    t = len(tail)
    omega_base = sum(e.alpha_base for e in tail) / (t * alpha_ideal)
    omega_new = sum(e.alpha_new for e in tail) / t
    omega_all = sum(e.alpha_all for e in tail) / (t * alpha_ideal)
    losses = tuple(1.0 - e.alpha_base / alpha_ideal for e in report.sessions)
    report.kemker_loss = list(losses)
    report.alpha_ideal = alpha_ideal
    return OmegaMetrics(
        omega_base=omega_base,
        omega_new=omega_new,
        omega_all=omega_all,
        alpha_ideal=alpha_ideal,
        kemker_loss=losses,
    )
