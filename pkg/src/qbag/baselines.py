"""Supervised baseline: CART decision trees and bagged trees."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .data import CLASS, NUMERIC, Dataset
from .ensemble import aggregate, draw_rows, learner_streams, parallel_map


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int | None = None
    min_samples_split: int = 2
    seed: int | None = None

    def __post_init__(self):
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 or None")


@dataclass(frozen=True)
class Leaf:
    value: int | float


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Leaf | Split"
    right: "Leaf | Split"


@dataclass(frozen=True, eq=False)
class DecisionTree:
    root: Leaf | Split
    task: str
    n_features: int
    n_classes: int | None = None
    config: TreeConfig = field(default_factory=TreeConfig)

    def depth(self) -> int:
        def walk(node):
            return 0 if isinstance(node, Leaf) else 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def n_leaves(self) -> int:
        def walk(node):
            return 1 if isinstance(node, Leaf) else walk(node.left) + walk(node.right)

        return walk(self.root)


def gini(labels, n_classes: int | None = None) -> float:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        return 0.0
    p = np.bincount(labels, minlength=n_classes or 0) / labels.size
    return float(1.0 - np.sum(p * p))


def _gini_scores(counts_left, n_left, counts_total, n):
    counts_right = counts_total - counts_left
    n_right = n - n_left
    gl = 1.0 - np.sum(counts_left**2, axis=1) / n_left**2
    gr = 1.0 - np.sum(counts_right**2, axis=1) / n_right**2
    return (n_left * gl + n_right * gr) / n


def _variance_scores(sum_left, sq_left, n_left, total, total_sq, n):
    n_right = n - n_left
    sse_left = sq_left - sum_left**2 / n_left
    sse_right = (total_sq - sq_left) - (total - sum_left) ** 2 / n_right
    return (sse_left + sse_right) / n


def best_split(X, y, task, n_classes=None):
    """Lowest weighted impurity over midpoints of sorted distinct values.

    Returns ``(score, feature, threshold)`` or ``None`` when every feature is
    constant. Ties go to the lowest feature index, then the lowest threshold.
    """
    n, d = X.shape
    if task == CLASS:
        onehot = np.eye(n_classes)[y]
        total = onehot.sum(axis=0)
    else:
        total, total_sq = y.sum(), np.sum(y * y)
    best = None
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        cut = np.flatnonzero(xs[1:] > xs[:-1])  # split after position cut
        if cut.size == 0:
            continue
        n_left = (cut + 1).astype(float)
        if task == CLASS:
            cum = np.cumsum(onehot[order], axis=0)[cut]
            scores = _gini_scores(cum, n_left, total, n)
        else:
            ys = y[order]
            scores = _variance_scores(np.cumsum(ys)[cut], np.cumsum(ys * ys)[cut], n_left, total, total_sq, n)
        i = int(np.argmin(scores))
        if best is None or scores[i] < best[0]:
            lo, hi = xs[cut[i]], xs[cut[i] + 1]
            mid = (lo + hi) / 2.0
            # adjacent floats: the midpoint may round up onto hi
            best = (float(scores[i]), j, float(mid if mid < hi else lo))
    return best


def _leaf_value(y, task, n_classes):
    if task == CLASS:
        return int(np.argmax(np.bincount(y, minlength=n_classes)))
    return float(np.mean(y))


def _impurity(y, task, n_classes):
    if task == CLASS:
        return gini(y, n_classes)
    return 0.0 if np.ptp(y) == 0 else float(np.var(y))


def _grow(X, y, task, n_classes, config, depth):
    if (
        _impurity(y, task, n_classes) == 0.0
        or y.size < config.min_samples_split
        or (config.max_depth is not None and depth >= config.max_depth)
    ):
        return Leaf(_leaf_value(y, task, n_classes))
    found = best_split(X, y, task, n_classes)
    if found is None:
        # identical rows with conflicting labels
        return Leaf(_leaf_value(y, task, n_classes))
    _, j, t = found
    go_left = X[:, j] <= t
    return Split(
        j,
        t,
        _grow(X[go_left], y[go_left], task, n_classes, config, depth + 1),
        _grow(X[~go_left], y[~go_left], task, n_classes, config, depth + 1),
    )


def fit_tree(X, y, config: TreeConfig | None = None, task: str = CLASS, n_classes=None, rng=None) -> DecisionTree:
    """Greedy CART growth; deterministic, so ``rng`` is accepted only for symmetry."""
    config = config or TreeConfig()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("fit_tree needs a non-empty 2-D feature matrix")
    if task == CLASS:
        y = np.asarray(y, dtype=np.int64)
        n_classes = int(n_classes if n_classes is not None else y.max() + 1)
    elif task == NUMERIC:
        y = np.asarray(y, dtype=float)
        n_classes = None
    else:
        raise ValueError(f"unknown task {task!r}")
    if y.shape != (X.shape[0],):
        raise ValueError("X and y differ in length")
    root = _grow(X, y, task, n_classes, config, 0)
    return DecisionTree(root, task, X.shape[1], n_classes, config)


def predict_tree(tree: DecisionTree, x):
    """Route left on ``x[feature] <= threshold``. Accepts one vector or a matrix."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != tree.n_features:
        raise ValueError(f"expected {tree.n_features} features, got {x.shape[-1]}")
    if x.ndim == 1:
        node = tree.root
        while isinstance(node, Split):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value
    return np.array([predict_tree(tree, row) for row in x])


@dataclass(frozen=True, eq=False)
class BaggedTrees:
    trees: tuple[DecisionTree, ...]
    task: str
    n_classes: int | None = None
    bootstrap_fraction: float = 0.5
    fit_seconds: tuple[float, ...] = ()

    @property
    def B(self) -> int:
        return len(self.trees)

    def truncated(self, B: int) -> "BaggedTrees":
        if not 1 <= B <= self.B:
            raise ValueError(f"B must lie in 1..{self.B}")
        return replace(self, trees=self.trees[:B], fit_seconds=self.fit_seconds[:B])


def fit_bagged_trees(train: Dataset, B: int, bootstrap_fraction: float = 0.5, tree_config=None, seed=None, threads=None) -> BaggedTrees:
    """``B`` trees on bootstrap draws taken with the same sampler as the QMeans ensemble."""
    if B < 1:
        raise ValueError("B must be >= 1")
    tree_config = tree_config or TreeConfig()
    X, y = train.features, train.labels

    def one(rng):
        start = time.perf_counter()
        rows = draw_rows(X.shape[0], bootstrap_fraction, rng)
        tree = fit_tree(X[rows], y[rows], tree_config, train.task, train.n_classes, rng)
        return tree, time.perf_counter() - start

    seed = tree_config.seed if seed is None else seed
    fitted = parallel_map(one, learner_streams(seed, B), threads)
    return BaggedTrees(
        tuple(t for t, _ in fitted),
        train.task,
        train.n_classes,
        bootstrap_fraction,
        tuple(s for _, s in fitted),
    )


def bagged_outputs(model: BaggedTrees, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.stack([predict_tree(t, X) for t in model.trees])


def predict_bagged(model: BaggedTrees, X):
    """Majority vote (classification) or mean (regression), same tie rule as QBB."""
    values, _, _ = aggregate(bagged_outputs(model, X), model.task, model.n_classes)
    return values
