"""Quantum bootstrapped bagging: QMeans base learners on QRAM-sampled subsets."""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import clustering
from .clustering import ClusterModel, QMeansConfig
from .data import CLASS, NUMERIC, Dataset, count_of
from .quantum import qram_bootstrap


def learner_streams(seed, n: int) -> list[np.random.Generator]:
    """One independent generator per learner, split from the master seed.

    ``SeedSequence.spawn`` is prefix stable, so the first ``n`` streams of a
    larger ensemble are the streams of the smaller one.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in ss.spawn(n)]


def max_threads() -> int:
    try:
        return max(1, int(os.environ.get("QBAG_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items, threads=None):
    threads = max_threads() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def bootstrap_size(fraction: float, n: int) -> int:
    return max(1, count_of(fraction, n, math.ceil))


def draw_rows(n: int, fraction: float, rng) -> np.ndarray:
    """Training rows of one learner.

    ``fraction == 1`` hands the learner the whole training set unchanged;
    otherwise ``ceil(fraction * n)`` indices come from :func:`qram_bootstrap`.
    """
    if fraction >= 1.0:
        return np.arange(n)
    return qram_bootstrap(n, bootstrap_size(fraction, n), rng).indices


@dataclass(frozen=True)
class QbbConfig:
    B: int = 8
    bootstrap_fraction: float = 0.5
    qmeans: QMeansConfig = field(default_factory=QMeansConfig)
    task: str = CLASS
    seed: int | None = 0

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if not 0.0 < self.bootstrap_fraction <= 1.0:
            raise ValueError("bootstrap_fraction must lie in (0, 1]")
        if self.task not in (CLASS, NUMERIC):
            raise ValueError(f"unknown task {self.task!r}")


@dataclass(frozen=True, eq=False)
class QbbModel:
    learners: tuple[ClusterModel, ...]
    task: str
    config: QbbConfig
    n_classes: int | None = None
    fit_seconds: tuple[float, ...] = ()

    @property
    def B(self) -> int:
        return len(self.learners)

    def truncated(self, B: int) -> "QbbModel":
        """The ensemble made of the first ``B`` learners."""
        if not 1 <= B <= self.B:
            raise ValueError(f"B must lie in 1..{self.B}")
        return replace(
            self,
            learners=self.learners[:B],
            config=replace(self.config, B=B),
            fit_seconds=self.fit_seconds[:B],
        )


@dataclass(frozen=True, eq=False)
class EnsemblePrediction:
    value: int | float
    per_learner: np.ndarray
    variance: float
    disagreement: float


def fit_learner(X, y, task, n_classes, qmeans: QMeansConfig, fraction: float, rng) -> ClusterModel:
    """Train one base hypothesis on its own bootstrap draw of ``(X, y)``."""
    rows = draw_rows(X.shape[0], fraction, rng)
    Xs, ys = X[rows], y[rows]
    model = clustering.fit_qmeans(Xs, qmeans, rng)
    # labels come from the (possibly noisy) labels of the learner's own sample
    return clustering.label_clusters(model, ys, model.assignment, task, n_classes)


def fit_qbb(train: Dataset, config: QbbConfig, threads=None) -> QbbModel:
    X, y = train.features, train.labels
    n = X.shape[0]
    if n < 1:
        raise ValueError("empty training set")
    M = n if config.bootstrap_fraction >= 1.0 else bootstrap_size(config.bootstrap_fraction, n)
    if M < config.qmeans.k:
        raise ValueError(f"bootstrap of M={M} samples cannot seed k={config.qmeans.k} centres")
    task = config.task
    n_classes = train.n_classes if task == CLASS else None
    streams = learner_streams(config.seed, config.B)

    def one(rng):
        start = time.perf_counter()
        h = fit_learner(X, y, task, n_classes, config.qmeans, config.bootstrap_fraction, rng)
        return h, time.perf_counter() - start

    fitted = parallel_map(one, streams, threads)
    return QbbModel(
        tuple(h for h, _ in fitted),
        task,
        config,
        n_classes,
        tuple(t for _, t in fitted),
    )


def learner_outputs(model: QbbModel, X, rng=None) -> np.ndarray:
    """``(B, n)`` matrix of per-learner predictions."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.empty((model.B, 0))
    X = np.atleast_2d(X)
    d = model.learners[0].n_features
    if X.shape[1] != d:
        raise ValueError(f"expected {d} features, got {X.shape[1]}")
    rng = np.random.default_rng(rng)
    return np.stack([clustering.predict(h, X, rng) for h in model.learners])


def aggregate(outputs, task: str, n_classes: int | None = None):
    """Aggregate a ``(B, n)`` output matrix column by column.

    Returns ``(values, variance, disagreement)``. ``variance`` is the mean squared
    deviation of the learners from their mean; ``disagreement`` is the share of
    learners not voting for the winning class (0 for regression).
    """
    outputs = np.asarray(outputs)
    B = outputs.shape[0]
    as_float = outputs.astype(float)
    variance = np.mean((as_float - as_float.mean(axis=0)) ** 2, axis=0)
    if task == CLASS:
        codes = outputs.astype(np.int64)
        n_classes = int(n_classes if n_classes is not None else codes.max(initial=0) + 1)
        votes = np.zeros((n_classes, codes.shape[1]), dtype=np.int64)
        for row in codes:
            votes[row, np.arange(codes.shape[1])] += 1
        values = np.argmax(votes, axis=0)
        disagreement = 1.0 - votes.max(axis=0, initial=0) / B
        return values, variance, disagreement
    values = as_float.mean(axis=0)
    return values, variance, np.zeros_like(values)


def predict_batch(model: QbbModel, X, rng=None) -> list[EnsemblePrediction]:
    outputs = learner_outputs(model, X, rng)
    values, variance, disagreement = aggregate(outputs, model.task, model.n_classes)
    cast = int if model.task == CLASS else float
    return [
        EnsemblePrediction(cast(values[i]), outputs[:, i], float(variance[i]), float(disagreement[i]))
        for i in range(outputs.shape[1])
    ]


def predict_one(model: QbbModel, x, rng=None) -> EnsemblePrediction:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("predict_one takes a single feature vector")
    return predict_batch(model, x[None, :], rng)[0]


def predict_values(model: QbbModel, X, rng=None) -> np.ndarray:
    """Aggregated predictions only, as an array."""
    values, _, _ = aggregate(learner_outputs(model, X, rng), model.task, model.n_classes)
    return values


def spread_of(model: QbbModel, X, rng=None) -> float:
    """Mean ensemble spread over ``X``: variance (regression) or disagreement (classification)."""
    _, variance, disagreement = aggregate(learner_outputs(model, X, rng), model.task, model.n_classes)
    per_point = disagreement if model.task == CLASS else variance
    return float(per_point.mean()) if per_point.size else 0.0


def ensemble_variance_profile(train: Dataset, test: Dataset, config_base: QbbConfig, B_values, repeats: int = 1, seed=None):
    """Mean test-set ensemble spread for each ``B``, averaged over ``repeats`` seeds.

    Each repeat trains one ensemble of ``max(B_values)`` learners and reads the
    smaller ensembles off its prefix.
    """
    B_values = list(B_values)
    if not B_values:
        raise ValueError("B_values is empty")
    repeat_seeds = np.random.SeedSequence(seed).spawn(repeats)
    totals = {B: 0.0 for B in B_values}
    for ss in repeat_seeds:
        full = fit_qbb(train, replace(config_base, B=max(B_values), seed=ss))
        for B in B_values:
            totals[B] += spread_of(full.truncated(B), test.features)
    return [(B, totals[B] / repeats) for B in B_values]
