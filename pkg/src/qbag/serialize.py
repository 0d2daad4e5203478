"""Text serialisation of fitted ensembles.

Models are written as JSON objects tagged ``{"format": "qbag-model",
"version": 1, "kind": ...}``. Python's ``json`` writes floats with their
shortest round-trip representation, so centroids, thresholds and cluster
outputs reload bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .baselines import BaggedTrees, DecisionTree, Leaf, Split, TreeConfig
from .clustering import ClusterModel, DistanceMode, QMeansConfig
from .data import CLASS
from .ensemble import QbbConfig, QbbModel

FORMAT = "qbag-model"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _seed_out(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    return seed


def _seed_in(raw):
    if isinstance(raw, dict):
        return np.random.SeedSequence(raw["entropy"], spawn_key=tuple(raw["spawn_key"]))
    return raw


def _mode_out(mode: DistanceMode):
    return {"kind": mode.kind, "shots": mode.shots}


def _outputs_out(outputs, task):
    if outputs is None:
        return None
    return [int(v) for v in outputs] if task == CLASS else [float(v) for v in outputs]


def _outputs_in(raw, task):
    if raw is None:
        return None
    return np.array(raw, dtype=np.int64 if task == CLASS else float)


def _learner_out(h: ClusterModel):
    return {
        "centroids": h.centroids.tolist(),
        "cluster_outputs": _outputs_out(h.cluster_outputs, h.task),
        "task": h.task,
        "mode": _mode_out(h.mode),
        "iterations_run": h.iterations_run,
        "inertia": h.inertia,
        "inertia_history": list(h.inertia_history),
    }


def _learner_in(raw) -> ClusterModel:
    return ClusterModel(
        centroids=np.array(raw["centroids"], dtype=float),
        mode=DistanceMode(**raw["mode"]),
        iterations_run=raw["iterations_run"],
        inertia=raw["inertia"],
        inertia_history=tuple(raw["inertia_history"]),
        cluster_outputs=_outputs_in(raw["cluster_outputs"], raw["task"]),
        task=raw["task"],
    )


def _qbb_out(model: QbbModel):
    cfg = model.config
    q = cfg.qmeans
    return {
        "task": model.task,
        "n_classes": model.n_classes,
        "config": {
            "B": cfg.B,
            "bootstrap_fraction": cfg.bootstrap_fraction,
            "task": cfg.task,
            "seed": _seed_out(cfg.seed),
            "qmeans": {
                "k": q.k,
                "delta": q.delta,
                "mode": _mode_out(q.mode),
                "max_iterations": q.max_iterations,
                "tolerance": q.tolerance,
                "seed": _seed_out(q.seed),
            },
        },
        "learners": [_learner_out(h) for h in model.learners],
    }


def _qbb_in(raw) -> QbbModel:
    c = raw["config"]
    q = c["qmeans"]
    config = QbbConfig(
        B=c["B"],
        bootstrap_fraction=c["bootstrap_fraction"],
        task=c["task"],
        seed=_seed_in(c["seed"]),
        qmeans=QMeansConfig(
            k=q["k"],
            delta=q["delta"],
            mode=DistanceMode(**q["mode"]),
            max_iterations=q["max_iterations"],
            tolerance=q["tolerance"],
            seed=_seed_in(q["seed"]),
        ),
    )
    learners = tuple(_learner_in(h) for h in raw["learners"])
    return QbbModel(learners, raw["task"], config, raw["n_classes"])


def _node_out(node):
    if isinstance(node, Leaf):
        return {"value": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_out(node.left),
        "right": _node_out(node.right),
    }


def _node_in(raw, task):
    if "value" in raw:
        return Leaf(int(raw["value"]) if task == CLASS else float(raw["value"]))
    return Split(raw["feature"], raw["threshold"], _node_in(raw["left"], task), _node_in(raw["right"], task))


def _trees_out(model: BaggedTrees):
    return {
        "task": model.task,
        "n_classes": model.n_classes,
        "bootstrap_fraction": model.bootstrap_fraction,
        "trees": [
            {
                "n_features": t.n_features,
                "max_depth": t.config.max_depth,
                "min_samples_split": t.config.min_samples_split,
                "root": _node_out(t.root),
            }
            for t in model.trees
        ],
    }


def _trees_in(raw) -> BaggedTrees:
    task = raw["task"]
    trees = tuple(
        DecisionTree(
            _node_in(t["root"], task),
            task,
            t["n_features"],
            raw["n_classes"],
            TreeConfig(t["max_depth"], t["min_samples_split"]),
        )
        for t in raw["trees"]
    )
    return BaggedTrees(trees, task, raw["n_classes"], raw["bootstrap_fraction"])


def dumps(model) -> str:
    if isinstance(model, QbbModel):
        body = {"kind": "qbb", **_qbb_out(model)}
    elif isinstance(model, BaggedTrees):
        body = {"kind": "bagged-trees", **_trees_out(model)}
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return json.dumps({"format": FORMAT, "version": VERSION, **body}, indent=1) + "\n"


def loads(text: str):
    raw = json.loads(text)
    if raw.get("format") != FORMAT:
        raise ModelFormatError("not a qbag model file")
    if raw.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model version {raw.get('version')!r}")
    kind = raw.get("kind")
    if kind == "qbb":
        return _qbb_in(raw)
    if kind == "bagged-trees":
        return _trees_in(raw)
    raise ModelFormatError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


def load_model(path):
    return loads(Path(path).read_text(encoding="utf-8"))
