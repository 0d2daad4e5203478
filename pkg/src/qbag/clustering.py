"""Delta-k++ seeded k-means (QMeans under the fidelity distance) and cluster labelling."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data import CLASS, NUMERIC
from .quantum import DEFAULT_SHOTS, fidelity_distance_matrix

EUCLIDEAN = "euclidean"
FIDELITY_EXACT = "fidelity-exact"
FIDELITY_SHOTS = "fidelity-shots"
MODES = (EUCLIDEAN, FIDELITY_EXACT, FIDELITY_SHOTS)


@dataclass(frozen=True)
class DistanceMode:
    kind: str = FIDELITY_EXACT
    shots: int | None = None

    def __post_init__(self):
        if self.kind not in MODES:
            raise ValueError(f"unknown distance mode {self.kind!r}; expected one of {MODES}")
        if self.kind == FIDELITY_SHOTS:
            if self.shots is None:
                object.__setattr__(self, "shots", DEFAULT_SHOTS)
            elif self.shots < 1:
                raise ValueError("shots must be >= 1")
        elif self.shots is not None:
            object.__setattr__(self, "shots", None)

    @classmethod
    def euclidean(cls):
        return cls(EUCLIDEAN)

    @classmethod
    def fidelity_exact(cls):
        return cls(FIDELITY_EXACT)

    @classmethod
    def fidelity_shots(cls, shots=DEFAULT_SHOTS):
        return cls(FIDELITY_SHOTS, shots)

    @property
    def is_fidelity(self) -> bool:
        return self.kind != EUCLIDEAN

    @property
    def exact(self) -> bool:
        return self.kind != FIDELITY_SHOTS

    def __str__(self):
        return self.kind if self.shots is None else f"{self.kind}({self.shots})"


@dataclass(frozen=True)
class QMeansConfig:
    k: int = 10
    delta: float = 1.0
    mode: DistanceMode = field(default_factory=DistanceMode)
    max_iterations: int = 100
    tolerance: float = 1e-4
    seed: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.delta > 0:
            raise ValueError("delta must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """``k`` centroids and, once labelled, one output per cluster."""

    centroids: np.ndarray
    mode: DistanceMode
    iterations_run: int = 0
    inertia: float = 0.0
    inertia_history: tuple[float, ...] = ()
    cluster_outputs: np.ndarray | None = None
    task: str | None = None
    assignment: np.ndarray | None = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def n_features(self) -> int:
        return self.centroids.shape[1]

    @property
    def labelled(self) -> bool:
        return self.cluster_outputs is not None


def squared_euclidean(X, C) -> np.ndarray:
    diff = np.asarray(X, dtype=float)[:, None, :] - np.asarray(C, dtype=float)[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def distances(X, C, mode: DistanceMode, rng=None) -> np.ndarray:
    """``(N, k)`` matrix of the mode's distance: squared Euclidean or ``1 - F``."""
    if mode.kind == EUCLIDEAN:
        return squared_euclidean(X, C)
    return fidelity_distance_matrix(X, C, shots=mode.shots, rng=rng)


def seeding_probabilities(d, delta: float) -> np.ndarray | None:
    """``d**delta / sum(d**delta)``, or ``None`` when every weight is zero.

    ``d`` already holds squared-distance quantities (squared Euclidean distance,
    or the fidelity distance), so the law is ``(dist^2)^delta``.
    """
    d = np.clip(np.asarray(d, dtype=float), 0.0, None)
    w = np.where(d > 0, d, 0.0) ** delta
    total = w.sum()
    if not total > 0:
        return None
    return w / total


def delta_kpp_init(X, k: int, delta: float, mode: DistanceMode | None = None, rng=None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    mode = mode or DistanceMode.euclidean()
    rng = np.random.default_rng(rng)
    n = X.shape[0]
    if k > n:
        raise ValueError(f"cannot seed k={k} centres from N={n} rows")
    if not delta > 0:
        raise ValueError("delta must be > 0")
    chosen = [int(rng.integers(n))]
    nearest = distances(X, X[chosen], mode, rng)[:, 0]
    nearest[chosen] = 0.0
    for _ in range(1, k):
        p = seeding_probabilities(nearest, delta)
        if p is None:
            rest = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(rest))
        else:
            nxt = int(rng.choice(n, p=p))
        chosen.append(nxt)
        nearest = np.minimum(nearest, distances(X, X[nxt : nxt + 1], mode, rng)[:, 0])
        nearest[chosen] = 0.0
    return X[chosen].copy()


def assign_clusters(X, centroids, mode: DistanceMode | None = None, rng=None) -> np.ndarray:
    """Nearest centroid per row; ``argmin`` keeps the lowest id on ties."""
    mode = mode or DistanceMode.euclidean()
    centroids = np.asarray(centroids, dtype=float)
    if centroids.shape[0] == 0:
        raise ValueError("no centroids")
    return np.argmin(distances(X, centroids, mode, rng), axis=1)


def update_centroids(X, assignment, k: int) -> np.ndarray:
    """Arithmetic mean per cluster.

    An empty cluster is moved onto the row lying farthest (squared Euclidean)
    from the mean of the cluster it belongs to; several empty clusters take
    successive farthest rows.
    """
    X = np.asarray(X, dtype=float)
    assignment = np.asarray(assignment)
    if assignment.size and assignment.max() >= k:
        raise ValueError("assignment refers to a cluster >= k")
    counts = np.bincount(assignment, minlength=k)
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, assignment, X)
    centroids = sums / np.maximum(counts, 1)[:, None]
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        spread = np.sum((X - centroids[assignment]) ** 2, axis=1)
        order = np.argsort(-spread, kind="stable")
        for cluster, row in zip(empty, order):
            centroids[cluster] = X[row]
    return centroids


def inertia_of(X, centroids, assignment) -> float:
    X = np.asarray(X, dtype=float)
    return float(np.sum((X - centroids[assignment]) ** 2))


def fit_qmeans(X, config: QMeansConfig, rng=None) -> ClusterModel:
    """Delta-k++ seeding followed by Lloyd iterations under ``config.mode``.

    The returned model carries the final training assignment but no cluster
    outputs yet (see :func:`label_clusters`). ``inertia_history`` records the
    Euclidean objective after every assign+update pair.
    """
    X = np.asarray(X, dtype=float)
    if rng is None:
        rng = config.seed
    rng = np.random.default_rng(rng)
    if config.k > X.shape[0]:
        raise ValueError(f"cannot fit k={config.k} clusters to N={X.shape[0]} rows")
    mode = config.mode
    centroids = delta_kpp_init(X, config.k, config.delta, mode, rng)
    history = []
    seen = set()
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        assignment = assign_clusters(X, centroids, mode, rng)
        updated = update_centroids(X, assignment, config.k)
        history.append(inertia_of(X, updated, assignment))
        shift = np.max(np.linalg.norm(updated - centroids, axis=1))
        centroids = updated
        if shift < config.tolerance:
            break
        if mode.exact:
            # fidelity assignment plus mean update can cycle; a repeated
            # assignment means the exact iteration would loop forever
            key = assignment.tobytes()
            if key in seen:
                break
            seen.add(key)
    assignment = assign_clusters(X, centroids, mode, rng)
    return ClusterModel(
        centroids=centroids,
        mode=mode,
        iterations_run=iterations,
        inertia=inertia_of(X, centroids, assignment),
        inertia_history=tuple(history),
        assignment=assignment,
    )


def majority(values, n_classes: int) -> int:
    """Most frequent class code; the smallest code wins a tie."""
    return int(np.argmax(np.bincount(np.asarray(values, dtype=np.int64), minlength=n_classes)))


def label_clusters(model: ClusterModel, labels, assignment=None, task: str = CLASS, n_classes=None) -> ClusterModel:
    """Attach the majority label (or mean target) of each cluster's members."""
    assignment = model.assignment if assignment is None else np.asarray(assignment)
    if assignment is None:
        raise ValueError("no assignment to label from")
    labels = np.asarray(labels)
    if labels.shape != assignment.shape:
        raise ValueError("labels and assignment differ in length")
    k = model.k
    if task == CLASS:
        labels = labels.astype(np.int64)
        n_classes = int(n_classes if n_classes is not None else labels.max() + 1)
        fallback = majority(labels, n_classes)
        outputs = np.full(k, fallback, dtype=np.int64)
        for c in range(k):
            members = labels[assignment == c]
            if members.size:
                outputs[c] = majority(members, n_classes)
    elif task == NUMERIC:
        labels = labels.astype(float)
        outputs = np.full(k, labels.mean())
        for c in range(k):
            members = labels[assignment == c]
            if members.size:
                outputs[c] = members.mean()
    else:
        raise ValueError(f"unknown task {task!r}")
    return replace(model, cluster_outputs=outputs, task=task, assignment=assignment)


def predict(model: ClusterModel, X, rng=None):
    """Output of the nearest centroid for each row (or for a single vector)."""
    if not model.labelled:
        raise ValueError("model has no cluster outputs; call label_clusters first")
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    out = model.cluster_outputs[assign_clusters(X, model.centroids, model.mode, rng)]
    return out[0] if single else out
