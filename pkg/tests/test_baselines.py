import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbag.baselines import (
    Leaf,
    Split,
    TreeConfig,
    best_split,
    fit_bagged_trees,
    fit_tree,
    gini,
    predict_bagged,
    predict_tree,
)
from qbag.data import CLASS, NUMERIC, Dataset, load_csv
from qbag.ensemble import learner_streams


def test_gini_examples():
    assert gini([1, 1, 0, 0]) == pytest.approx(0.5)
    assert gini([2, 2, 2]) == 0.0
    assert gini([0, 1, 2], 3) == pytest.approx(1 - 1 / 3)


@settings(max_examples=60, deadline=None)
@given(labels=st.lists(st.integers(0, 4), min_size=1, max_size=40))
def test_gini_bounds(labels):
    g = gini(labels, 5)
    assert 0.0 <= g <= 1 - 1 / 5 + 1e-12
    assert (g == 0.0) == (len(set(labels)) == 1)


def test_tree_examples():
    pure = fit_tree(np.array([[1.0], [2.0]]), [3, 3], n_classes=4)
    assert isinstance(pure.root, Leaf) and pure.root.value == 3
    assert predict_tree(pure, [100.0]) == 3
    tree = fit_tree(np.array([[1.0], [2.0], [3.0], [4.0]]), [0, 0, 1, 1])
    assert isinstance(tree.root, Split) and tree.root.threshold == 2.5 and tree.root.feature == 0
    assert predict_tree(tree, np.array([[1.0], [2.0], [3.0], [4.0]])).tolist() == [0, 0, 1, 1]
    assert predict_tree(tree, [2.5]) == 0  # boundary routes left
    with pytest.raises(ValueError):
        predict_tree(tree, [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_tree(np.empty((0, 1)), [])


def test_tie_prefers_lowest_feature_then_threshold():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    tree = fit_tree(X, [0, 0, 1, 1])
    assert tree.root.feature == 0
    found = best_split(np.array([[0.0], [1.0], [2.0]]), np.array([0, 1, 0]), CLASS, 2)
    assert found[2] == 0.5


def test_xor_memorised():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    tree = fit_tree(X, y)
    assert predict_tree(tree, X).tolist() == y.tolist()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 40), d=st.integers(1, 4))
def test_unlimited_depth_memorises(seed, n, d):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 5, size=(n, d)).astype(float)
    _, first = np.unique(X, axis=0, return_index=True)
    X = X[np.sort(first)]
    y = rng.integers(0, 3, size=len(X))
    tree = fit_tree(X, y, n_classes=3)
    assert np.array_equal(predict_tree(tree, X), y)


def test_depth_and_min_split():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(80, 3))
    y = rng.integers(0, 2, size=80)
    assert fit_tree(X, y, TreeConfig(max_depth=2)).depth() <= 2
    assert fit_tree(X, y, TreeConfig(max_depth=0)).n_leaves() == 1
    stump = fit_tree(X, y, TreeConfig(min_samples_split=81))
    assert stump.n_leaves() == 1
    with pytest.raises(ValueError):
        TreeConfig(min_samples_split=1)


def test_conflicting_duplicates_take_majority():
    X = np.array([[1.0], [1.0], [1.0]])
    tree = fit_tree(X, [1, 0, 1])
    assert tree.root == Leaf(1)
    reg = fit_tree(X, [1.0, 2.0, 6.0], task=NUMERIC)
    assert reg.root == Leaf(3.0)


def test_regression_tree():
    X = np.arange(6.0)[:, None]
    y = np.array([1.0, 1.0, 1.0, 5.0, 5.0, 5.0])
    tree = fit_tree(X, y, task=NUMERIC)
    assert tree.root.threshold == 2.5
    assert predict_tree(tree, [[0.0], [5.0]]).tolist() == [1.0, 5.0]


def test_leaves_come_from_training_labels():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(50, 2))
    y = rng.choice([0, 2], size=50)
    tree = fit_tree(X, y, n_classes=3)

    def leaves(node):
        return [node.value] if isinstance(node, Leaf) else leaves(node.left) + leaves(node.right)

    assert set(leaves(tree.root)) <= {0, 2}


def test_bagged_single_equals_tree(data_dir):
    ds = load_csv(data_dir / "wine.csv")
    bag = fit_bagged_trees(ds, 1, 1.0, seed=5)
    tree = fit_tree(ds.features, ds.labels, n_classes=3, rng=learner_streams(5, 1)[0])
    assert np.array_equal(predict_bagged(bag, ds.features), predict_tree(tree, ds.features))


def test_bagged_prefix_and_determinism(data_dir):
    ds = load_csv(data_dir / "iris.csv")
    big = fit_bagged_trees(ds, 6, 0.5, seed=3)
    small = fit_bagged_trees(ds, 2, 0.5, seed=3)
    assert np.array_equal(predict_bagged(big.truncated(2), ds.features), predict_bagged(small, ds.features))
    again = fit_bagged_trees(ds, 6, 0.5, seed=3, threads=3)
    assert np.array_equal(predict_bagged(big, ds.features), predict_bagged(again, ds.features))
    assert big.B == 6 and len(big.fit_seconds) == 6


def test_bagged_regression():
    X = np.arange(20.0)[:, None]
    ds = Dataset("r", X, X[:, 0] * 2.0, NUMERIC)
    bag = fit_bagged_trees(ds, 4, 0.5, seed=0)
    pred = predict_bagged(bag, X)
    assert pred.dtype == float and np.mean((pred - ds.labels) ** 2) < 4.0
