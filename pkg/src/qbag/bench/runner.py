"""Grid runner: (delta, repeat) cells, each evaluated for every ensemble size."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from .. import baselines, ensemble
from ..clustering import QMeansConfig
from ..data import (
    CLASS,
    Dataset,
    DataError,
    NoiseReport,
    ScalerParams,
    apply_scaler,
    fit_scaler,
    inject_label_noise,
    load_csv,
    split_indices,
)
from ..metrics import accuracy, mse
from .config import (
    DT_BAGGING,
    SINGLE_KMEANS,
    SINGLE_QMEANS,
    ExperimentConfig,
    ResultRow,
)

log = logging.getLogger(__name__)


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CellAudit:
    """What one grid cell trained and evaluated on, handed to audit hooks."""

    learner: str
    delta: float
    delta_index: int
    repeat_index: int
    seed: int
    raw: Dataset
    train_idx: np.ndarray
    test_idx: np.ndarray
    scaler: ScalerParams
    train: Dataset
    test: Dataset
    noise: NoiseReport
    model: object


def cell_seed(master_seed: int, delta_index: int, repeat_index: int) -> int:
    """64-bit seed of one (delta, repeat) cell; all ensemble sizes share it."""
    ss = np.random.SeedSequence([master_seed, delta_index, repeat_index])
    return int(ss.generate_state(1, np.uint64)[0])


def prepare_cell(raw: Dataset, config: ExperimentConfig, seed: int):
    """Split, scale on the training part only, corrupt training labels only."""
    split_ss, noise_ss, model_ss = np.random.SeedSequence(seed).spawn(3)
    classification = raw.task == CLASS
    train_idx, test_idx = split_indices(
        raw, config.test_fraction, stratified=classification, rng=np.random.default_rng(split_ss)
    )
    train, test = raw.subset(train_idx), raw.subset(test_idx)
    scaler = fit_scaler(train)
    train, test = apply_scaler(scaler, train), apply_scaler(scaler, test)
    if classification:
        train, noise = inject_label_noise(train, config.noise_rate, np.random.default_rng(noise_ss))
    else:
        noise = NoiseReport(0.0)
    return train_idx, test_idx, scaler, train, test, noise, model_ss


def fit_learner(config: ExperimentConfig, train: Dataset, delta: float, B: int, seed):
    """Fit the configured learner with ``B`` members (one for single learners)."""
    if config.learner == DT_BAGGING:
        return baselines.fit_bagged_trees(train, B, config.bootstrap_fraction, config.tree, seed=seed)
    qmeans = QMeansConfig(
        k=config.k,
        delta=delta,
        mode=config.learner_distance,
        max_iterations=config.max_iterations,
        tolerance=config.tolerance,
    )
    if config.learner in (SINGLE_QMEANS, SINGLE_KMEANS):
        qbb = ensemble.QbbConfig(B=1, bootstrap_fraction=1.0, qmeans=qmeans, task=train.task, seed=seed)
    else:
        qbb = ensemble.QbbConfig(B=B, bootstrap_fraction=config.bootstrap_fraction, qmeans=qmeans, task=train.task, seed=seed)
    return ensemble.fit_qbb(train, qbb)


def _outputs(model, X, rng):
    if isinstance(model, baselines.BaggedTrees):
        return baselines.bagged_outputs(model, X)
    return ensemble.learner_outputs(model, X, rng)


def evaluate(model, ds: Dataset, rng=None):
    """``(metric, mean ensemble spread)`` of ``model`` on ``ds``."""
    values, variance, disagreement = ensemble.aggregate(_outputs(model, ds.features, rng), ds.task, ds.n_classes)
    if ds.task == CLASS:
        return accuracy(values, ds.labels), float(disagreement.mean())
    return mse(values, ds.labels), float(variance.mean())


def run_experiment(config: ExperimentConfig, dataset: Dataset | None = None, audit=None) -> list[ResultRow]:
    """Run every (delta, B, repeat) cell of ``config`` for its learner.

    For each (delta, repeat) cell one ensemble of ``max(B)`` members is trained;
    the ensemble of size ``B`` is its first ``B`` members, which is exactly what
    a separate fit of size ``B`` with the same seed would produce.
    """
    raw = dataset if dataset is not None else _load(config)
    single = config.learner in (SINGLE_QMEANS, SINGLE_KMEANS)
    B_max = 1 if single else max(config.B_values)
    rows = []
    for di, delta in enumerate(config.delta_values):
        for r in range(config.repeats):
            seed = cell_seed(config.master_seed, di, r)
            where = f"{config.learner} on {raw.name}, delta={delta:g} (index {di}), repeat {r}"
            try:
                train_idx, test_idx, scaler, train, test, noise, model_ss = prepare_cell(raw, config, seed)
                model = fit_learner(config, train, delta, B_max, model_ss)
            except (ValueError, ArithmeticError) as exc:
                raise ExperimentError(f"{where}: {exc}") from exc
            if audit is not None:
                audit(CellAudit(config.learner, delta, di, r, seed, raw, train_idx, test_idx, scaler, train, test, noise, model))
            log.debug("fitted %s", where)
            for B in config.B_values:
                start = time.perf_counter()
                try:
                    sub = model if single else model.truncated(B)
                    eval_rng = np.random.default_rng([seed, B])
                    train_metric, _ = evaluate(sub, train, eval_rng)
                    test_metric, spread = evaluate(sub, test, eval_rng)
                except (ValueError, ArithmeticError) as exc:
                    raise ExperimentError(f"{where}, B={B}: {exc}") from exc
                elapsed = 1000.0 * (sum(sub.fit_seconds) + time.perf_counter() - start)
                rows.append(
                    ResultRow(
                        dataset=raw.name,
                        learner=config.learner,
                        B=B,
                        delta=delta,
                        repeat_index=r,
                        seed=seed,
                        train_metric=train_metric,
                        test_metric=test_metric,
                        metric_kind=config.metric_kind,
                        mean_ensemble_variance=spread,
                        wall_time_ms=elapsed if config.record_timing else 0.0,
                    )
                )
    return sort_rows(rows)


def sort_rows(rows):
    return sorted(rows, key=lambda row: (row.dataset, row.learner, row.delta, row.B, row.repeat_index))


def run_learners(config: ExperimentConfig, learners, dataset: Dataset | None = None, audit=None) -> list[ResultRow]:
    raw = dataset if dataset is not None else _load(config)
    rows = []
    for learner in learners:
        rows.extend(run_experiment(replace(config, learner=learner), raw, audit))
    return sort_rows(rows)


def _load(config):
    try:
        return load_csv(config.dataset, config.label_column, config.task)
    except DataError as exc:
        raise ExperimentError(f"cannot load dataset {config.dataset}: {exc}") from exc
