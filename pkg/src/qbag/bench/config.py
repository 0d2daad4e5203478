from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..baselines import TreeConfig
from ..clustering import DistanceMode
from ..data import CLASS, NUMERIC

QMEANS_BAGGING = "qmeans_bagging"
KMEANS_BAGGING = "kmeans_bagging"
DT_BAGGING = "dt_bagging"
SINGLE_QMEANS = "single_qmeans"
SINGLE_KMEANS = "single_kmeans"
LEARNERS = (QMEANS_BAGGING, KMEANS_BAGGING, DT_BAGGING, SINGLE_QMEANS, SINGLE_KMEANS)
TABLE2_LEARNERS = (DT_BAGGING, KMEANS_BAGGING, QMEANS_BAGGING)

DISPLAY_NAMES = {
    DT_BAGGING: "Supervised (DT)",
    KMEANS_BAGGING: "Classical (KMeans)",
    QMEANS_BAGGING: "Quantum (QMeans)",
    SINGLE_QMEANS: "Single QMeans",
    SINGLE_KMEANS: "Single KMeans",
}

DEFAULT_B = tuple(range(4, 33, 4))
DEFAULT_DELTAS = (0.1, 0.2, 0.3, 0.4)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: Path
    label_column: str | None = None
    task: str = CLASS
    learner: str = QMEANS_BAGGING
    B_values: tuple[int, ...] = DEFAULT_B
    delta_values: tuple[float, ...] = DEFAULT_DELTAS
    k: int = 10
    noise_rate: float = 0.05
    repeats: int = 5
    test_fraction: float = 0.2
    distance: DistanceMode = field(default_factory=DistanceMode.fidelity_exact)
    bootstrap_fraction: float = 0.5
    master_seed: int = 42
    output_dir: Path = Path("results")
    tree: TreeConfig = field(default_factory=TreeConfig)
    max_iterations: int = 100
    tolerance: float = 1e-4
    record_timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dataset", Path(self.dataset))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        object.__setattr__(self, "B_values", tuple(int(b) for b in self.B_values))
        object.__setattr__(self, "delta_values", tuple(float(d) for d in self.delta_values))
        if self.task not in (CLASS, NUMERIC):
            raise ConfigError(f"unknown task {self.task!r}")
        if self.learner not in LEARNERS:
            raise ConfigError(f"unknown learner {self.learner!r}; choose from {', '.join(LEARNERS)}")
        if not self.B_values or min(self.B_values) < 1:
            raise ConfigError("B values must be a non-empty list of positive integers")
        if not self.delta_values or not all(d > 0 and math.isfinite(d) for d in self.delta_values):
            raise ConfigError("delta values must be a non-empty list of positive numbers")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ConfigError("noise rate must lie in [0, 1)")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test fraction must lie in (0, 1)")
        if not 0.0 < self.bootstrap_fraction <= 1.0:
            raise ConfigError("bootstrap fraction must lie in (0, 1]")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @property
    def metric_kind(self) -> str:
        return "accuracy" if self.task == CLASS else "mse"

    @property
    def learner_distance(self) -> DistanceMode:
        """Distance the learner clusters with; k-means learners are always Euclidean."""
        if self.learner in (KMEANS_BAGGING, SINGLE_KMEANS):
            return DistanceMode.euclidean()
        return self.distance


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    learner: str
    B: int
    delta: float
    repeat_index: int
    seed: int
    train_metric: float
    test_metric: float
    metric_kind: str
    mean_ensemble_variance: float
    wall_time_ms: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]
