"""CSV loading, schema inference, imputation, splitting, normalization and label encoding.

Cell representation: numeric columns hold ``float``, categorical columns hold
``str``, missing cells hold ``None``. Datasets are immutable after
construction and safe to share between threads; every operation here is a
pure function of its inputs plus the seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DataError

NUMERIC = "numeric"
CATEGORICAL = "categorical"

DEFAULT_MISSING_MARKERS = ("", "NA", "NaN", "nan")


def canonical_token(value) -> str:
    """Canonical string form of a cell, used for label/category tokens."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # NUMERIC or CATEGORICAL


@dataclass(frozen=True)
class Schema:
    """Ordered column list with designated label and personalization columns."""

    columns: tuple[Column, ...]
    label_column: Optional[str] = None
    personalization_column: Optional[str] = None

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if any(not n for n in names):
            raise DataError("column names must be non-empty")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate header names: {', '.join(dupes)}")
        for attr in ("label_column", "personalization_column"):
            col = getattr(self, attr)
            if col is not None and col not in names:
                raise DataError(f"{attr.replace('_', ' ')} '{col}' not found in header")
        if self.label_column is not None and self.label_column == self.personalization_column:
            raise DataError("personalization column must differ from label column")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def index_of(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise DataError(f"column '{name}' not found")

    def kind_of(self, name: str) -> str:
        return self.columns[self.index_of(name)].kind


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    rows: tuple[tuple, ...]

    def __post_init__(self):
        width = len(self.schema.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise DataError(f"row {i} has {len(row)} cells, expected {width}")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        j = self.schema.index_of(name)
        return [row[j] for row in self.rows]

    def missing_count(self) -> int:
        return sum(cell is None for row in self.rows for cell in row)

    def with_target(self, label_column: str, personalization_column: Optional[str] = None) -> "Dataset":
        """Designate the label (and optionally personalization) column."""
        schema = replace(
            self.schema,
            label_column=label_column,
            personalization_column=personalization_column,
        )
        return Dataset(schema=schema, rows=self.rows)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(schema=self.schema, rows=tuple(self.rows[i] for i in indices))

    def label_tokens(self) -> list[str]:
        if self.schema.label_column is None:
            raise DataError("no label column designated")
        return [canonical_token(v) for v in self.column(self.schema.label_column)]


def concat(parts: Sequence[Dataset]) -> Dataset:
    if not parts:
        raise DataError("cannot concatenate zero datasets")
    schema = parts[0].schema
    rows = tuple(row for p in parts for row in p.rows)
    return Dataset(schema=schema, rows=rows)


def _parses_numeric(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def infer_schema(header: Sequence[str], rows: Sequence[Sequence[Optional[str]]]) -> Schema:
    """A column is numeric iff every non-missing cell parses as a decimal number.

    ``rows`` hold raw string tokens with missing cells already mapped to None.
    Row order does not affect the result.
    """
    columns = []
    for j, name in enumerate(header):
        values = [row[j] for row in rows if row[j] is not None]
        numeric = all(_parses_numeric(v) for v in values)
        columns.append(Column(name=name, kind=NUMERIC if numeric else CATEGORICAL))
    return Schema(columns=tuple(columns))


def load_csv(path, missing_markers: Iterable[str] = DEFAULT_MISSING_MARKERS) -> Dataset:
    """Load an RFC-4180 CSV with a header row into a typed Dataset.

    Cells equal to one of ``missing_markers`` become missing. Raises
    DataError for unreadable files, empty files and ragged rows.
    """
    markers = set(missing_markers)
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            table = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read '{path}': {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"'{path}' is not valid UTF-8 text") from exc
    if not table:
        raise DataError(f"'{path}' is empty")
    header = table[0]
    raw_rows = []
    for i, row in enumerate(table[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"ragged row at line {i}: {len(row)} cells, expected {len(header)}")
        raw_rows.append([None if cell in markers else cell for cell in row])
    if not raw_rows:
        raise DataError(f"'{path}' has a header but no data rows")
    schema = infer_schema(header, raw_rows)
    rows = []
    for raw in raw_rows:
        cells = []
        for cell, col in zip(raw, schema.columns):
            if cell is None:
                cells.append(None)
            elif col.kind == NUMERIC:
                cells.append(float(cell))
            else:
                cells.append(cell)
        rows.append(tuple(cells))
    return Dataset(schema=schema, rows=tuple(rows))


# --- imputation ---------------------------------------------------------

IMPUTE_POLICIES = ("mean", "median", "most_frequent", "constant", "none")


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2 == 1:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0  # midpoint convention


def _mode(values: list) -> object:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    best_count = max(counts.values())
    # count ties broken by the smallest value (lexicographic for tokens)
    return min(v for v, c in counts.items() if c == best_count)


@dataclass(frozen=True)
class Imputer:
    """Fitted per-column fill values for a given policy."""

    policy: str
    fill_values: dict = field(default_factory=dict)  # column name -> fill (None if not computable)

    def apply(self, d: Dataset) -> Dataset:
        if self.policy == "none":
            return d
        rows = []
        for row in d.rows:
            cells = list(row)
            for j, col in enumerate(d.schema.columns):
                if cells[j] is None:
                    fill = self.fill_values.get(col.name)
                    if fill is None:
                        raise DataError(
                            f"cannot impute column '{col.name}': no {self.policy} statistic available"
                        )
                    cells[j] = fill
            rows.append(tuple(cells))
        return Dataset(schema=d.schema, rows=tuple(rows))


def fit_imputer(d: Dataset, policy: str, constant=None) -> Imputer:
    """Compute per-column fill statistics over non-missing cells.

    mean/median apply to numeric columns only; a categorical column with
    missing cells under those policies is an error, as is a column that is
    entirely missing.
    """
    if policy not in IMPUTE_POLICIES:
        raise DataError(f"unknown imputation policy '{policy}' (choose from {', '.join(IMPUTE_POLICIES)})")
    if policy == "none":
        return Imputer(policy="none")
    fills: dict = {}
    for j, col in enumerate(d.schema.columns):
        values = [row[j] for row in d.rows if row[j] is not None]
        has_missing = len(values) < d.n_rows
        if not values:
            raise DataError(f"column '{col.name}' is entirely missing; no statistic computable")
        if policy == "constant":
            if col.kind == NUMERIC:
                try:
                    fills[col.name] = float(constant)
                except (TypeError, ValueError):
                    raise DataError(
                        f"constant fill {constant!r} is not numeric for column '{col.name}'"
                    ) from None
            else:
                fills[col.name] = str(constant)
        elif policy == "most_frequent":
            fills[col.name] = _mode(values)
        elif col.kind == NUMERIC:
            fills[col.name] = float(np.mean(values)) if policy == "mean" else _median(values)
        else:
            if has_missing:
                raise DataError(f"{policy} imputation requested on categorical column '{col.name}'")
            fills[col.name] = None
    return Imputer(policy=policy, fill_values=fills)


def impute(d: Dataset, policy: str, constant=None) -> Dataset:
    return fit_imputer(d, policy, constant=constant).apply(d)


# --- splitting ----------------------------------------------------------


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    validation: Dataset
    test: Dataset
    seed: int
    fractions: tuple[float, float]  # (test_frac, val_frac)


def _largest_remainder(quotas: list[float], total: int) -> list[int]:
    base = [int(math.floor(q)) for q in quotas]
    short = total - sum(base)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:short]:
        base[i] += 1
    return base


def split(d: Dataset, test_frac: float, val_frac: float, seed: int, stratify: bool = False) -> SplitDataset:
    """Seeded train/validation/test partition.

    Test rows are carved first from a seeded shuffle, validation from the
    remainder. Stratified splits preserve class proportions within one row
    per class (largest-remainder allocation).
    """
    for name, frac in (("test_frac", test_frac), ("val_frac", val_frac)):
        if not (0.0 <= frac < 1.0):
            raise DataError(f"{name} must lie in [0, 1), got {frac}")
    n = d.n_rows
    n_test = _round_half_up(n * test_frac)
    n_val = _round_half_up((n - n_test) * val_frac)
    if n - n_test - n_val <= 0:
        raise DataError(
            f"fractions leave an empty train set (N={n}, test={n_test}, val={n_val})"
        )
    rng = np.random.default_rng(seed)
    perm = [int(i) for i in rng.permutation(n)]
    if not stratify:
        test_idx = perm[:n_test]
        val_idx = perm[n_test:n_test + n_val]
        train_idx = perm[n_test + n_val:]
    else:
        tokens = d.label_tokens()
        buckets: dict[str, list[int]] = {}
        for i in perm:
            buckets.setdefault(tokens[i], []).append(i)
        for token, members in buckets.items():
            if len(members) < 2:
                raise DataError(f"stratified split requires >= 2 rows per class; class '{token}' has 1")
        classes = sorted(buckets)
        test_alloc = _largest_remainder([len(buckets[c]) * n_test / n for c in classes], n_test)
        remainder = n - n_test
        val_alloc = _largest_remainder(
            [(len(buckets[c]) - a) * n_val / remainder for c, a in zip(classes, test_alloc)], n_val
        )
        test_idx, val_idx, train_idx = [], [], []
        for c, t_count, v_count in zip(classes, test_alloc, val_alloc):
            members = buckets[c]
            test_idx.extend(members[:t_count])
            val_idx.extend(members[t_count:t_count + v_count])
            train_idx.extend(members[t_count + v_count:])
    return SplitDataset(
        train=d.subset(train_idx),
        validation=d.subset(val_idx),
        test=d.subset(test_idx),
        seed=seed,
        fractions=(test_frac, val_frac),
    )


# --- normalization ------------------------------------------------------


@dataclass(frozen=True)
class Normalizer:
    """Per-column z-score parameters fitted on training data (population stddev)."""

    means: np.ndarray
    stds: np.ndarray

    @property
    def degenerate(self) -> np.ndarray:
        return self.stds == 0.0

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.means.shape[0]:
            raise DataError(
                f"normalizer fitted on {self.means.shape[0]} columns, got matrix with shape {X.shape}"
            )
        safe = np.where(self.degenerate, 1.0, self.stds)
        out = (X - self.means) / safe
        out[:, self.degenerate] = 0.0
        return out


def fit_normalizer(train: np.ndarray) -> Normalizer:
    train = np.asarray(train, dtype=float)
    if train.size == 0:
        raise DataError("cannot fit normalizer on an empty matrix")
    means = train.mean(axis=0)
    stds = np.sqrt(((train - means) ** 2).mean(axis=0))  # population convention
    return Normalizer(means=means, stds=stds)


def normalize(train: np.ndarray, apply_to: Sequence[np.ndarray] = ()) -> tuple[Normalizer, list[np.ndarray]]:
    """Fit a z-score normalizer on ``train`` and transform train plus ``apply_to``.

    Returns the normalizer and the transformed matrices, train first. Train
    statistics are never recomputed on the apply_to matrices.
    """
    norm = fit_normalizer(train)
    return norm, [norm.transform(m) for m in (train, *apply_to)]


# --- label encoding -----------------------------------------------------


@dataclass(frozen=True)
class LabelEncoding:
    classes: tuple[str, ...]  # lexicographically sorted

    def __post_init__(self):
        if not self.classes:
            raise DataError("label encoding requires at least one class")

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        index = {c: i for i, c in enumerate(self.classes)}
        out = np.empty(len(tokens), dtype=int)
        for i, t in enumerate(tokens):
            if t not in index:
                raise DataError(f"unknown class token '{t}'")
            out[i] = index[t]
        return out

    def decode(self, indices: Sequence[int]) -> list[str]:
        return [self.classes[int(i)] for i in indices]


def encode_labels(tokens: Sequence[str]) -> tuple[LabelEncoding, np.ndarray]:
    """Map tokens to contiguous indices in lexicographic token order."""
    if len(tokens) == 0:
        raise DataError("cannot encode an empty label column")
    encoding = LabelEncoding(classes=tuple(sorted(set(tokens))))
    return encoding, encoding.encode(tokens)


# --- feature matrix construction ---------------------------------------


@dataclass(frozen=True)
class FeatureEncoder:
    """Maps dataset rows to a numeric matrix.

    Numeric columns pass through; categorical columns are one-hot encoded with
    lexicographic category order fixed at fit time. Unseen categories at
    transform time map to the all-zeros vector. The label and personalization
    columns are always excluded.
    """

    source_columns: tuple[Column, ...]
    categories: dict  # column name -> tuple of category tokens

    @property
    def feature_names(self) -> tuple[str, ...]:
        names = []
        for col in self.source_columns:
            if col.kind == NUMERIC:
                names.append(col.name)
            else:
                names.extend(f"{col.name}={cat}" for cat in self.categories[col.name])
        return tuple(names)

    def transform(self, d: Dataset) -> np.ndarray:
        available = set(d.schema.names)
        missing = [c.name for c in self.source_columns if c.name not in available]
        if missing:
            raise DataError(f"input is missing feature columns: {', '.join(missing)}")
        out = np.empty((d.n_rows, len(self.feature_names)), dtype=float)
        j_out = 0
        for col in self.source_columns:
            values = d.column(col.name)
            if col.kind == NUMERIC:
                out[:, j_out] = [_coerce_numeric(v, col.name) for v in values]
                j_out += 1
            else:
                cats = self.categories[col.name]
                block = np.zeros((d.n_rows, len(cats)), dtype=float)
                index = {c: k for k, c in enumerate(cats)}
                for i, v in enumerate(values):
                    if v is None:
                        raise DataError(
                            f"missing cell in column '{col.name}'; impute before building features"
                        )
                    k = index.get(canonical_token(v))
                    if k is not None:
                        block[i, k] = 1.0
                out[:, j_out:j_out + len(cats)] = block
                j_out += len(cats)
        return out


def _coerce_numeric(value, col_name: str) -> float:
    if value is None:
        raise DataError(f"missing cell in column '{col_name}'; impute before building features")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise DataError(f"column '{col_name}' expected numeric, got {value!r}") from None


def fit_feature_encoder(d: Dataset) -> FeatureEncoder:
    excluded = {d.schema.label_column, d.schema.personalization_column}
    source = tuple(c for c in d.schema.columns if c.name not in excluded)
    if not source:
        raise DataError("no feature columns remain after excluding label/personalization columns")
    categories = {}
    for col in source:
        if col.kind == CATEGORICAL:
            tokens = {canonical_token(v) for v in d.column(col.name) if v is not None}
            categories[col.name] = tuple(sorted(tokens))
    return FeatureEncoder(source_columns=source, categories=categories)
