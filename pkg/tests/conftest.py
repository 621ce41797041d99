import numpy as np
import pytest

from adaptoml.dataset import Column, Dataset, Schema


def make_dataset(columns, rows, label=None, person=None):
    """Build a Dataset from (name, kind) pairs and literal row tuples."""
    schema = Schema(
        columns=tuple(Column(name=n, kind=k) for n, k in columns),
        label_column=label,
        personalization_column=person,
    )
    return Dataset(schema=schema, rows=tuple(tuple(r) for r in rows))


def write_csv(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_classification_data(rng, n, d, k=2, spread=2.0):
    """Gaussian class blobs; returns (X, y) with y in 0..k-1."""
    centers = rng.normal(0.0, spread, size=(k, d))
    y = rng.integers(0, k, size=n)
    X = centers[y] + rng.normal(0.0, 1.0, size=(n, d))
    return X, y
