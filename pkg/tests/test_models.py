import itertools

import numpy as np
import pytest

from adaptoml.errors import CapabilityError, DataError, SignatureError
from adaptoml.models import ModelSpec, create_model, families_for_task, family_info

from conftest import random_classification_data


def nb(**hp):
    return create_model(ModelSpec("gaussian_nb", hp))


def sgd_clf(**hp):
    return create_model(ModelSpec("sgd_classifier", hp))


def knn(**hp):
    return create_model(ModelSpec("knn_classifier", hp))


def tree(**hp):
    return create_model(ModelSpec("decision_tree", hp))


# --- Gaussian NB -----------------------------------------------------------


def test_nb_sufficient_statistics_hand_example():
    m = nb().fit([[0.0], [0.0], [1.0], [1.0]], [0, 0, 1, 1])
    assert m.means[:, 0].tolist() == [0.0, 1.0]
    assert m.class_priors().tolist() == [0.5, 0.5]
    # x = 0.1 is far closer to the class-0 mean under the tiny smoothed variance
    assert m.predict([[0.1]]).tolist() == [0]


def test_nb_tie_breaks_to_smallest_class_index():
    # symmetric classes: identical likelihoods at any x
    m = nb().fit([[0.0], [1.0], [0.0], [1.0]], [0, 0, 1, 1])
    assert m.predict([[0.4], [2.0]]).tolist() == [0, 0]


def test_nb_incremental_equals_batch(rng):
    for _ in range(20):
        n = int(rng.integers(8, 60))
        d = int(rng.integers(1, 5))
        X, y = random_classification_data(rng, n, d, k=int(rng.integers(2, 4)))
        classes = sorted(np.unique(y).tolist())
        batch = nb().fit(X, y)
        cuts = sorted(rng.choice(np.arange(1, n), size=min(3, n - 1), replace=False).tolist())
        inc = nb()
        start = 0
        for cut in cuts + [n]:
            inc.partial_fit(X[start:cut], y[start:cut], classes=classes)
            start = cut
        assert np.abs(batch.means - inc.means).max() < 1e-9
        assert np.abs(batch.class_variances() - inc.class_variances()).max() < 1e-9
        assert np.abs(batch.class_priors() - inc.class_priors()).max() < 1e-9
        probe = rng.normal(size=(25, d))
        assert np.array_equal(batch.predict(probe), inc.predict(probe))


def test_nb_partial_fit_requires_classes_then_rejects_unknown():
    m = nb()
    with pytest.raises(DataError, match="requires the class list"):
        m.partial_fit([[1.0]], [0])
    m.partial_fit([[1.0]], [0], classes=[0, 1])
    with pytest.raises(DataError, match="unknown class"):
        m.partial_fit([[1.0]], [2])


def test_nb_never_predicts_unseen_declared_class(rng):
    m = nb()
    m.partial_fit([[0.0], [1.0]], [0, 0], classes=[0, 1, 2])
    m.partial_fit([[3.0], [4.0]], [2, 2])
    preds = m.predict(rng.normal(size=(50, 1)))
    assert set(preds.tolist()) <= {0, 2}  # class 1 never observed


# --- SGD ---------------------------------------------------------------------


def test_sgd_single_logistic_step_hand_value():
    # z = 0 -> gradient -y*sigmoid(-y*z) = -0.5, so one lr=0.1 step gives 0.05
    m = sgd_clf(learning_rate=0.1)
    m.partial_fit([[1.0]], [1], classes=[0, 1])
    assert m.weights[0, 0] == pytest.approx(0.05)
    assert m.bias[0] == pytest.approx(0.05)


def test_sgd_zero_weights_predicts_class_zero(rng):
    m = sgd_clf()
    m.partial_fit(np.zeros((1, 3)), [1], classes=[0, 1])
    m.weights[:] = 0.0
    m.bias[:] = 0.0
    assert set(m.predict(rng.normal(size=(10, 3))).tolist()) == {0}


def test_sgd_fit_bit_reproducible(rng):
    X, y = random_classification_data(rng, 40, 3)
    a = sgd_clf(seed=9).fit(X, y)
    b = sgd_clf(seed=9).fit(X, y)
    assert a.weights.tobytes() == b.weights.tobytes()
    assert a.bias.tobytes() == b.bias.tobytes()


def test_sgd_multiclass_predicts_within_classes(rng):
    X, y = random_classification_data(rng, 60, 4, k=3)
    m = sgd_clf().fit(X, y)
    assert set(m.predict(rng.normal(size=(30, 4))).tolist()) <= {0, 1, 2}


def test_sgd_regressor_learns_linear_trend(rng):
    X = rng.uniform(-1, 1, size=(80, 1))
    y = 3.0 * X[:, 0] + 1.0
    m = create_model(ModelSpec("sgd_regressor", {"learning_rate": 0.05, "epochs": 300}))
    m.fit(X, y)
    pred = m.predict([[0.5]])
    assert pred[0] == pytest.approx(2.5, abs=0.1)


# --- kNN ----------------------------------------------------------------------


def test_knn_memorizes():
    m = knn(k=1).fit([[0.0], [1.0]], [0, 1])
    assert m.rows.shape == (2, 1)
    assert m.predict([[0.0], [1.0], [0.2]]).tolist() == [0, 1, 0]


def test_knn_partial_fit_equals_fit_on_concat(rng):
    X, y = random_classification_data(rng, 30, 2, k=3)
    inc = knn(k=3)
    inc.partial_fit(X[:10], y[:10], classes=[0, 1, 2])
    inc.partial_fit(X[10:], y[10:])
    batch = knn(k=3).fit(X, y)
    probe = rng.normal(size=(20, 2))
    assert np.array_equal(inc.predict(probe), batch.predict(probe))


def test_knn_distance_tie_prefers_lower_stored_index():
    # both stored rows are equidistant from the probe; the earlier row wins
    m = knn(k=1).fit([[1.0], [-1.0]], [1, 0])
    assert m.predict([[0.0]]).tolist() == [1]


def test_knn_vote_tie_prefers_smallest_class():
    m = knn(k=2).fit([[0.0], [1.0]], [1, 0])
    assert m.predict([[0.5]]).tolist() == [0]


def test_knn_regressor_mean_of_neighbors():
    m = create_model(ModelSpec("knn_regressor", {"k": 2}))
    m.fit([[0.0], [1.0], [10.0]], [1.0, 3.0, 100.0])
    assert m.predict([[0.4]]).tolist() == [2.0]


# --- decision tree --------------------------------------------------------------


def test_tree_partial_fit_capability_error():
    with pytest.raises(CapabilityError, match="does not support partial_fit"):
        tree().partial_fit([[0.0]], [0], classes=[0, 1])


@pytest.mark.parametrize("n_features", [2, 3])
def test_tree_fits_any_consistent_boolean_table(n_features):
    rows = list(itertools.product([0.0, 1.0], repeat=n_features))
    X = np.array(rows)
    rng = np.random.default_rng(5)
    for _ in range(12):
        y = rng.integers(0, 2, size=len(rows))
        m = tree(max_depth=n_features, min_samples_split=2).fit(X, y)
        assert np.array_equal(m.predict(X), y)


def test_tree_solves_xor_exactly():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    m = tree(max_depth=2).fit(X, y)
    assert np.array_equal(m.predict(X), y)


def test_tree_depth_limit_produces_leaf_majority():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 0, 1])
    m = tree(max_depth=1).fit(X, y)
    assert len([n for n in m.nodes if n["feature"] != -1]) == 1  # one split only


# --- shared contracts -------------------------------------------------------------


ALL =  [("gaussian_nb", {}), ("sgd_classifier", {}), ("knn_classifier", {}), ("decision_tree", {}),
        ("sgd_regressor", {}), ("knn_regressor", {})]


@pytest.mark.parametrize("family,hp", ALL)
def test_clone_is_deep_and_isolated(family, hp, rng):
    info = family_info(family)
    X, y = random_classification_data(rng, 20, 2)
    if info.task == "regression":
        y = y.astype(float) + rng.normal(size=20)
    m = create_model(ModelSpec(family, hp)).fit(X, y)
    probe = rng.normal(size=(10, 2))
    before = m.predict(probe).copy()
    twin = m.clone()
    assert np.array_equal(twin.predict(probe), before)
    if info.incremental:
        twin.partial_fit(X + 10.0, y)
        assert np.array_equal(m.predict(probe), before)  # original untouched


def test_clone_of_unfitted_model_is_unfitted():
    twin = nb().clone()
    assert not twin.fitted


@pytest.mark.parametrize("family,hp", ALL)
def test_single_class_fit_predicts_that_class(family, hp, rng):
    info = family_info(family)
    X = rng.normal(size=(6, 2))
    y = np.full(6, 1 if info.task == "classification" else 2.5)
    m = create_model(ModelSpec(family, hp)).fit(X, y)
    preds = m.predict(rng.normal(size=(8, 2)))
    if info.task == "classification":
        assert set(preds.tolist()) == {1}


@pytest.mark.parametrize("family,hp", ALL)
def test_input_guards(family, hp):
    m = create_model(ModelSpec(family, hp))
    with pytest.raises(DataError, match="not fitted"):
        m.predict([[0.0]])
    with pytest.raises(DataError, match="NaN or infinite"):
        m.fit([[np.nan]], [0])
    with pytest.raises(DataError, match="empty"):
        m.fit(np.empty((0, 2)), [])
    m.fit([[0.0, 1.0]], [0])
    with pytest.raises(SignatureError, match="trained on 2 features"):
        m.predict([[0.0]])


def test_hyperparameter_range_validation():
    with pytest.raises(DataError, match="out of range"):
        create_model(ModelSpec("knn_classifier", {"k": 0}))
    with pytest.raises(DataError, match="out of range"):
        create_model(ModelSpec("sgd_classifier", {"learning_rate": -1.0}))
    with pytest.raises(DataError, match="unknown hyperparameter"):
        create_model(ModelSpec("gaussian_nb", {"bogus": 1}))
    with pytest.raises(DataError, match="unknown model family"):
        create_model(ModelSpec("svm", {}))


def test_families_for_task():
    assert families_for_task("classification") == (
        "gaussian_nb", "sgd_classifier", "knn_classifier", "decision_tree",
    )
    assert families_for_task("regression") == ("sgd_regressor", "knn_regressor")
