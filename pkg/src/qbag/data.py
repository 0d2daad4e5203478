"""Datasets, CSV ingestion, scaling, splitting and label corruption."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from decimal import Decimal
from pathlib import Path
from typing import Sequence

import numpy as np

CLASS = "class"
NUMERIC = "numeric"

DEFAULT_LABEL_COLUMN = {CLASS: "label", NUMERIC: "target"}


class DataError(ValueError):
    """Base class for dataset problems."""


class MissingFileError(DataError, FileNotFoundError):
    pass


class MissingColumnError(DataError):
    pass


class NonNumericCellError(DataError):
    def __init__(self, path, line, column, value):
        super().__init__(f"{path}:{line}: column {column!r} holds non-numeric value {value!r}")
        self.line = line
        self.column = column
        self.value = value


class EmptyDatasetError(DataError):
    pass


class UnsupportedTaskError(DataError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus a class or numeric label vector.

    Class labels are contiguous codes ``0..n_classes-1``; ``class_values`` maps a
    code back to the value it had in the source file.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    task: str = CLASS
    feature_names: tuple[str, ...] = ()
    n_classes: int | None = None
    class_values: tuple[float, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        if X.shape[0] < 1:
            raise EmptyDatasetError(f"dataset {self.name!r} has no rows")
        if not np.all(np.isfinite(X)):
            raise DataError(f"dataset {self.name!r} has non-finite feature values")
        if self.task not in (CLASS, NUMERIC):
            raise UnsupportedTaskError(f"unknown task {self.task!r}")
        if self.task == CLASS:
            y = np.asarray(self.labels, dtype=np.int64)
            n_classes = self.n_classes if self.n_classes is not None else int(y.max()) + 1
            if y.min() < 0 or y.max() >= n_classes:
                raise DataError("class labels must lie in 0..n_classes-1")
        else:
            y = np.asarray(self.labels, dtype=float)
            if not np.all(np.isfinite(y)):
                raise DataError(f"dataset {self.name!r} has non-finite targets")
            n_classes = None
        if y.shape != (X.shape[0],):
            raise DataError(f"labels length {y.shape} does not match {X.shape[0]} rows")
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError("feature_names length does not match feature count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "n_classes", n_classes)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def is_classification(self) -> bool:
        return self.task == CLASS

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return replace(self, features=self.features[idx], labels=self.labels[idx])

    def with_features(self, features) -> "Dataset":
        return replace(self, features=features)

    def with_labels(self, labels) -> "Dataset":
        return replace(self, labels=labels)


def count_of(fraction: float, n: int, rounding=math.floor) -> int:
    """``rounding(fraction * n)`` evaluated on the decimal literal of ``fraction``.

    ``0.29 * 100`` is 28.999... in binary floating point; here it is 29.
    """
    return int(rounding(Decimal(repr(float(fraction))) * n))


def load_csv(path, label_column: str | None = None, task: str = CLASS, name: str | None = None) -> Dataset:
    """Read a headered, all-numeric CSV file into a :class:`Dataset`."""
    if task not in (CLASS, NUMERIC):
        raise UnsupportedTaskError(f"unknown task {task!r}")
    path = Path(path)
    label_column = label_column or DEFAULT_LABEL_COLUMN[task]
    if not path.is_file():
        raise MissingFileError(f"no such dataset file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise EmptyDatasetError(f"{path}: missing header row")
        header = [h.strip() for h in header]
        if label_column not in header:
            raise MissingColumnError(f"{path}: label column {label_column!r} not in header {header}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line_no}: expected {len(header)} cells, found {len(row)}")
            values = []
            for column, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise NonNumericCellError(path, line_no, column, cell) from None
                if not math.isfinite(value):
                    raise NonNumericCellError(path, line_no, column, cell)
                values.append(value)
            rows.append(values)
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")
    table = np.array(rows, dtype=float)
    j = header.index(label_column)
    features = np.delete(table, j, axis=1)
    feature_names = tuple(h for i, h in enumerate(header) if i != j)
    raw = table[:, j]
    name = name or path.stem
    if task == NUMERIC:
        return Dataset(name, features, raw, NUMERIC, feature_names)
    values, codes = np.unique(raw, return_inverse=True)
    return Dataset(
        name,
        features,
        codes.astype(np.int64),
        CLASS,
        feature_names,
        n_classes=len(values),
        class_values=tuple(float(v) for v in values),
    )


def split_indices(ds: Dataset, test_fraction: float = 0.2, stratified: bool = True, rng=None):
    """Return sorted ``(train_idx, test_idx)`` index arrays."""
    rng = np.random.default_rng(rng)
    if not 0.0 < test_fraction < 1.0:
        raise DataError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = ds.n_samples
    n_test = count_of(test_fraction, n, round)
    if n_test < 1 or n_test > n - 1:
        raise DataError(f"test_fraction={test_fraction} leaves an empty partition for N={n}")
    if stratified:
        if not ds.is_classification:
            raise UnsupportedTaskError("stratified splitting needs class labels")
        classes = np.arange(ds.n_classes)
        sizes = np.bincount(ds.labels, minlength=ds.n_classes)
        exact = sizes * (n_test / n)
        alloc = np.floor(exact).astype(int)
        # largest remainder, ties to the lower class code
        order = sorted(classes, key=lambda c: (-(exact[c] - alloc[c]), c))
        for c in order[: n_test - alloc.sum()]:
            alloc[c] += 1
        test = []
        for c in classes:
            members = np.flatnonzero(ds.labels == c)
            test.append(rng.permutation(members)[: alloc[c]])
        test_idx = np.sort(np.concatenate(test))
    else:
        test_idx = np.sort(rng.permutation(n)[:n_test])
    mask = np.ones(n, dtype=bool)
    mask[test_idx] = False
    return np.flatnonzero(mask), test_idx


def train_test_split(ds: Dataset, test_fraction: float = 0.2, stratified: bool = True, rng=None):
    train_idx, test_idx = split_indices(ds, test_fraction, stratified, rng)
    return ds.subset(train_idx), ds.subset(test_idx)


@dataclass(frozen=True, eq=False)
class ScalerParams:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def inverse_transform(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=float) * self.std + self.mean


def fit_scaler(train: Dataset) -> ScalerParams:
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    # constant columns: centred to 0, left unscaled
    std = np.where(std > 0, std, 1.0)
    return ScalerParams(mean, std)


def apply_scaler(params: ScalerParams, ds: Dataset) -> Dataset:
    return ds.with_features(params.transform(ds.features))


@dataclass(frozen=True)
class NoiseReport:
    rate: float
    flipped_indices: tuple[int, ...] = field(default=())


def inject_label_noise(ds: Dataset, rate: float, rng=None):
    """Relabel exactly ``floor(rate * N)`` samples, each to a different random class."""
    rng = np.random.default_rng(rng)
    if not ds.is_classification:
        raise UnsupportedTaskError("label noise is only defined for class labels")
    if not 0.0 <= rate < 1.0:
        raise DataError(f"noise rate must lie in [0, 1), got {rate}")
    n_flip = count_of(rate, ds.n_samples)
    if n_flip == 0:
        return ds, NoiseReport(rate)
    if ds.n_classes < 2:
        raise UnsupportedTaskError("label noise needs at least two classes")
    idx = np.sort(rng.choice(ds.n_samples, size=n_flip, replace=False))
    shift = rng.integers(1, ds.n_classes, size=n_flip)
    labels = ds.labels.copy()
    labels[idx] = (labels[idx] + shift) % ds.n_classes
    return ds.with_labels(labels), NoiseReport(rate, tuple(int(i) for i in idx))


def inject_target_noise(ds: Dataset, sigma: float, rng=None) -> Dataset:
    """Additive Gaussian noise on numeric targets (not used by the benchmark grid)."""
    rng = np.random.default_rng(rng)
    if ds.is_classification:
        raise UnsupportedTaskError("target noise needs numeric labels")
    if sigma < 0:
        raise DataError("sigma must be non-negative")
    return ds.with_labels(ds.labels + rng.normal(0.0, sigma, size=ds.n_samples))


def synthesize_blobs(
    n_per_cluster: int,
    d: int,
    k: int,
    spread: float = 1.0,
    rng=None,
    *,
    separation: float = 10.0,
    task: str = CLASS,
    return_centers: bool = False,
):
    """Isotropic Gaussian blobs around ``k`` centres at least ``separation`` apart.

    With ``task="numeric"`` the target of a sample is its blob index plus
    Gaussian noise of scale ``spread``.
    """
    rng = np.random.default_rng(rng)
    if k < 1 or d < 1 or n_per_cluster < 1:
        raise DataError("need k >= 1, d >= 1 and n_per_cluster >= 1")
    centers = _separated_centers(k, d, separation, rng)
    blob = np.repeat(np.arange(k), n_per_cluster)
    X = centers[blob] + rng.normal(0.0, spread, size=(k * n_per_cluster, d))
    if task == NUMERIC:
        y = blob + rng.normal(0.0, spread, size=blob.shape)
        ds = Dataset("blobs", X, y, NUMERIC)
    else:
        ds = Dataset("blobs", X, blob, CLASS, n_classes=k)
    return (ds, centers) if return_centers else ds


def _separated_centers(k, d, separation, rng, tries=1000):
    half = separation * max(k, 2)
    for _ in range(tries):
        centers = rng.uniform(-half, half, size=(k, d))
        if k == 1:
            return centers
        gaps = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=-1)
        if gaps[np.triu_indices(k, 1)].min() >= separation:
            return centers
    centers = np.zeros((k, d))
    centers[:, 0] = separation * np.arange(k)
    return centers


def class_counts(labels: Sequence[int], n_classes: int) -> np.ndarray:
    return np.bincount(np.asarray(labels, dtype=np.int64), minlength=n_classes)
