"""Accuracy, MSE and repeat summaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _paired(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("no predictions")
    return pred, truth


def accuracy(pred, truth) -> float:
    pred, truth = _paired(pred, truth)
    return float(np.mean(pred == truth))


def mse(pred, truth) -> float:
    pred, truth = _paired(pred, truth)
    err = pred.astype(float) - truth.astype(float)
    return float(np.mean(err * err))


@dataclass(frozen=True)
class RepeatSummary:
    mean: float
    std: float
    n_repeats: int
    raw: tuple[float, ...]


def summarize_repeats(values) -> RepeatSummary:
    """Mean and population standard deviation (ddof=0)."""
    raw = tuple(float(v) for v in values)
    if not raw:
        raise ValueError("no values to summarise")
    arr = np.array(raw)
    return RepeatSummary(float(arr.mean()), float(arr.std()), len(raw), raw)
