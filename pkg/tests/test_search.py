import numpy as np
import pytest

from adaptoml.dataset import encode_labels, split
from adaptoml.errors import DataError
from adaptoml.search import (
    SearchConfig,
    default_grid,
    evaluate_candidate,
    grid_search,
    select_best,
)

from conftest import make_dataset


def clustered_dataset(n_per_class=10, gap=100.0, seed=0):
    """Two far-apart 1-D clusters: nearest-neighbor separable."""
    rng = np.random.default_rng(seed)
    rows = []
    for c, center in enumerate((0.0, gap)):
        for _ in range(n_per_class):
            rows.append((center + rng.normal(), "u1" if rng.random() < 0.5 else "u2", "AB"[c]))
    rng.shuffle(rows)
    return make_dataset(
        [("x", "numeric"), ("user", "categorical"), ("y", "categorical")],
        rows, label="y", person="user",
    )


def search_config(**kw):
    defaults = dict(task="classification", families=("knn_classifier",), criterion="accuracy", seed=3)
    defaults.update(kw)
    return SearchConfig(**defaults)


# --- default_grid ------------------------------------------------------------


def test_grid_product_counts():
    grid = default_grid(
        "classification", ["knn_classifier"],
        grids={"knn_classifier": [{"k": 1}, {"k": 3}, {"k": 5}]},
    )
    assert len(grid) == 6  # 3 hyperparameter combos x normalization {on, off}
    assert [c.candidate_id for c in grid] == list(range(6))


def test_grid_sums_across_families():
    grid = default_grid(
        "classification", ["gaussian_nb", "knn_classifier"],
        normalization=True,
        grids={"gaussian_nb": [{}, {}, {}], "knn_classifier": [{"k": k} for k in (1, 2, 3, 4)]},
    )
    assert len(grid) == 7


def test_grid_default_sizes():
    grid = default_grid("classification", ["gaussian_nb", "sgd_classifier", "knn_classifier", "decision_tree"])
    # (1 + 6 + 4 + 3) families-combos x 2 normalization variants
    assert len(grid) == 28


def test_grid_errors():
    with pytest.raises(DataError, match="no model families"):
        default_grid("classification", [])
    with pytest.raises(DataError, match="not compatible"):
        default_grid("classification", ["sgd_regressor"])


def test_grid_enumeration_deterministic():
    a = default_grid("classification", ["knn_classifier", "gaussian_nb"])
    b = default_grid("classification", ["gaussian_nb", "knn_classifier"])
    assert [(c.family, c.hyperparameters, c.normalize) for c in a] == [
        (c.family, c.hyperparameters, c.normalize) for c in b
    ]  # zoo order, not argument order


# --- evaluate_candidate -------------------------------------------------------


def test_knn_separable_validation_accuracy_one():
    d = clustered_dataset()
    parts = split(d, 0.2, 0.3, seed=1)
    enc, _ = encode_labels(d.label_tokens())
    grid = default_grid("classification", ["knn_classifier"], normalization=False,
                        grids={"knn_classifier": [{"k": 1}]})
    res = evaluate_candidate(grid[0], parts, "accuracy", "classification", enc, seed=0)
    assert res.error is None
    assert res.validation_score == 1.0


def test_constant_model_scores_half_on_balanced_validation():
    # train rows all class A -> NB predicts A constantly; validation is balanced
    rows = [(float(i), "A") for i in range(8)] + [(float(i) + 0.5, "B") for i in range(4)]
    d = make_dataset([("x", "numeric"), ("y", "categorical")], rows, label="y")
    enc, _ = encode_labels(d.label_tokens())
    # hand-built split: train = the 8 A rows, validation = 4 B rows + 4 A rows
    from adaptoml.dataset import SplitDataset

    parts = SplitDataset(
        train=d.subset(range(4, 8)),
        validation=d.subset([0, 1, 8, 9]),
        test=d.subset([2, 3, 10, 11]),
        seed=0,
        fractions=(0.3, 0.3),
    )
    grid = default_grid("classification", ["gaussian_nb"], normalization=False)
    res = evaluate_candidate(grid[0], parts, "accuracy", "classification", enc, seed=0)
    assert res.validation_score == 0.5


def test_normalization_neutral_for_knn_when_scales_match():
    # second feature is a permutation of the first: identical per-axis spread,
    # so the z-score rescales both axes equally and neighbor order is unchanged
    rng = np.random.default_rng(8)
    base = rng.normal(size=24)
    rows = []
    for i in range(24):
        rows.append((float(base[i]), float(base[(i * 7 + 3) % 24]), "AB"[i % 2]))
    d = make_dataset([("x1", "numeric"), ("x2", "numeric"), ("y", "categorical")], rows, label="y")
    parts = split(d, 0.25, 0.25, seed=2)
    enc, _ = encode_labels(d.label_tokens())
    grids = {"knn_classifier": [{"k": 3}]}
    on = default_grid("classification", ["knn_classifier"], normalization=True, grids=grids)[0]
    off = default_grid("classification", ["knn_classifier"], normalization=False, grids=grids)[0]
    res_on = evaluate_candidate(on, parts, "accuracy", "classification", enc, seed=0)
    res_off = evaluate_candidate(off, parts, "accuracy", "classification", enc, seed=0)
    y_val = enc.encode(parts.validation.label_tokens())
    pred_on = res_on.model.predict(res_on.chain.transform(parts.validation))
    pred_off = res_off.model.predict(res_off.chain.transform(parts.validation))
    assert np.array_equal(pred_on, pred_off)
    assert len(y_val) == parts.validation.n_rows


# --- grid_search ----------------------------------------------------------------


def test_grid_search_tie_resolves_to_lower_id():
    d = clustered_dataset()
    parts = split(d, 0.2, 0.3, seed=1)
    enc, _ = encode_labels(d.label_tokens())
    # k=19 uses every stored row (majority vote, weaker); the two k=1 clones tie at 1.0
    cfg = search_config(normalization=False,
                        grids={"knn_classifier": [{"k": 19}, {"k": 1}, {"k": 1}]})
    result = grid_search(parts, cfg, enc)
    scores = [r.validation_score for r in result.results]
    assert scores[1] == scores[2] == 1.0
    assert result.best_id == 1


def test_grid_search_single_candidate():
    d = clustered_dataset(n_per_class=6)
    parts = split(d, 0.2, 0.3, seed=1)
    enc, _ = encode_labels(d.label_tokens())
    cfg = search_config(normalization=True, grids={"knn_classifier": [{"k": 1}]})
    assert grid_search(parts, cfg, enc).best_id == 0


def test_grid_search_matches_reevaluation_oracle():
    d = clustered_dataset(n_per_class=8, gap=3.0, seed=5)
    parts = split(d, 0.2, 0.3, seed=4)
    enc, _ = encode_labels(d.label_tokens())
    cfg = search_config(families=("gaussian_nb", "knn_classifier"), criterion="macro_f1")
    result = grid_search(parts, cfg, enc)
    rescored = []
    for entry in result.results:
        res = evaluate_candidate(entry.candidate, parts, cfg.criterion, cfg.task, enc, cfg.seed)
        rescored.append(res.validation_score)
        assert res.validation_score == entry.validation_score  # determinism
    best = max(range(len(rescored)), key=lambda i: (rescored[i], -i))
    assert result.best_id == best


def test_grid_search_schedule_independent():
    d = clustered_dataset(n_per_class=8, gap=3.0, seed=6)
    parts = split(d, 0.2, 0.3, seed=4)
    enc, _ = encode_labels(d.label_tokens())
    serial = grid_search(parts, search_config(), enc)
    threaded = grid_search(parts, search_config(workers=4), enc)
    assert serial.best_id == threaded.best_id
    assert [r.validation_score for r in serial.results] == [
        r.validation_score for r in threaded.results
    ]


def test_grid_search_records_progress():
    d = clustered_dataset(n_per_class=6)
    parts = split(d, 0.2, 0.3, seed=1)
    enc, _ = encode_labels(d.label_tokens())
    seen = []
    grid_search(parts, search_config(), enc, progress=lambda done, total: seen.append((done, total)))
    assert seen[-1] == (len(seen), len(seen))


# --- select_best -------------------------------------------------------------------


def test_select_best_refits_on_train_plus_validation():
    d = clustered_dataset(n_per_class=10)
    parts = split(d, 0.2, 0.3, seed=1)
    enc, _ = encode_labels(d.label_tokens())
    cfg = search_config(normalization=False, grids={"knn_classifier": [{"k": 1}]})
    result = grid_search(parts, cfg, enc)
    model, chain = select_best(result, parts, cfg, enc)
    assert model.rows.shape[0] == parts.train.n_rows + parts.validation.n_rows  # kNN memorizes both
    assert model.feature_signature == chain.feature_names
    assert "user" not in model.feature_signature  # personalization column excluded


def test_selection_invariant_to_score_scaling():
    # argmax invariance: doubling every validation score keeps the same winner
    d = clustered_dataset(n_per_class=8, gap=3.0, seed=7)
    parts = split(d, 0.2, 0.3, seed=4)
    enc, _ = encode_labels(d.label_tokens())
    result = grid_search(parts, search_config(), enc)
    doubled = [r.validation_score * 2 for r in result.results]
    best = 0
    for i in range(1, len(doubled)):
        if doubled[i] > doubled[best]:
            best = i
    assert best == result.best_id
