"""Bagged ensembles of delta-k++ k-means learners with simulated quantum subroutines."""
from .clustering import ClusterModel, DistanceMode, QMeansConfig, fit_qmeans
from .data import Dataset, load_csv
from .ensemble import EnsemblePrediction, QbbConfig, QbbModel, fit_qbb, predict_batch, predict_one
from .quantum import amplitude_encode, fidelity_distance, swap_test_exact, swap_test_sampled

__version__ = "0.1.0"

__all__ = [
    "ClusterModel",
    "Dataset",
    "DistanceMode",
    "EnsemblePrediction",
    "QMeansConfig",
    "QbbConfig",
    "QbbModel",
    "amplitude_encode",
    "fidelity_distance",
    "fit_qbb",
    "fit_qmeans",
    "load_csv",
    "predict_batch",
    "predict_one",
    "swap_test_exact",
    "swap_test_sampled",
]
