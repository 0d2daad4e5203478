import math
import xml.etree.ElementTree as ET
from dataclasses import replace

import numpy as np
import pytest

from qbag.bench.cli import cli_main
from qbag.bench.config import ConfigError, ExperimentConfig, ResultRow
from qbag.bench.report import emit_csv, emit_plot, read_csv, summarize
from qbag.bench.runner import ExperimentError, cell_seed, run_experiment, run_learners
from qbag.clustering import DistanceMode
from qbag.data import NUMERIC, synthesize_blobs
from qbag.ensemble import QbbModel

from conftest import write_csv

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def iris_cfg(data_dir):
    return ExperimentConfig(data_dir / "iris.csv", distance=DistanceMode.euclidean())


def row(**kw):
    base = dict(
        dataset="d", learner="qmeans_bagging", B=4, delta=0.1, repeat_index=0, seed=1,
        train_metric=0.9, test_metric=0.8, metric_kind="accuracy", mean_ensemble_variance=0.1, wall_time_ms=0.0,
    )
    base.update(kw)
    return ResultRow(**base)


def test_config_validation(data_dir):
    path = data_dir / "iris.csv"
    bad = [
        {"learner": "svm"}, {"B_values": ()}, {"B_values": (0,)}, {"delta_values": ()},
        {"delta_values": (-0.1,)}, {"repeats": 0}, {"noise_rate": 1.0}, {"test_fraction": 0.0},
        {"bootstrap_fraction": 1.5}, {"k": 0}, {"task": "rank"}, {"master_seed": -1},
    ]
    for kw in bad:
        with pytest.raises(ConfigError):
            ExperimentConfig(path, **kw)
    cfg = ExperimentConfig(path, learner="kmeans_bagging")
    assert cfg.learner_distance == DistanceMode.euclidean()
    assert cfg.metric_kind == "accuracy"
    assert ExperimentConfig(path, task=NUMERIC).metric_kind == "mse"


def test_grid_row_count(iris_cfg):
    rows = run_experiment(iris_cfg)
    assert len(rows) == 4 * 8 * 5
    assert all(math.isfinite(r.test_metric) and r.metric_kind == "accuracy" for r in rows)
    assert all(r.wall_time_ms == 0.0 for r in rows)


def test_seeds_depend_on_delta_and_repeat_only():
    assert cell_seed(42, 0, 0) == cell_seed(42, 0, 0)
    assert len({cell_seed(42, d, r) for d in range(4) for r in range(5)}) == 20
    assert cell_seed(42, 0, 0) != cell_seed(43, 0, 0)


def test_determinism(iris_cfg):
    cfg = replace(iris_cfg, repeats=1, B_values=(4, 8), delta_values=(0.2,))
    assert run_experiment(cfg) == run_experiment(cfg)


def test_single_equals_bagging_with_full_fraction(iris_cfg):
    base = replace(iris_cfg, noise_rate=0.0, repeats=3, delta_values=(0.2, 0.4), B_values=(1,), bootstrap_fraction=1.0)
    single = run_experiment(replace(base, learner="single_kmeans"))
    bagged = run_experiment(replace(base, learner="kmeans_bagging"))
    assert [r.test_metric for r in single] == [r.test_metric for r in bagged]


def test_audit_hook(iris_cfg):
    seen = []
    cfg = replace(iris_cfg, repeats=2, B_values=(4,), delta_values=(0.1, 0.3))
    run_learners(cfg, ["dt_bagging", "qmeans_bagging"], audit=seen.append)
    assert len(seen) == 8
    for cell in seen:
        raw = cell.raw
        # test labels are the clean source labels
        assert np.array_equal(cell.test.labels, raw.labels[cell.test_idx])
        # noise only on train, exactly floor(0.05 * 120) = 6 flips
        assert np.sum(cell.train.labels != raw.labels[cell.train_idx]) == 6
        assert len(cell.noise.flipped_indices) == 6
        # scaler recomputed from the training partition alone
        Xtr = raw.features[cell.train_idx]
        assert np.allclose(cell.scaler.mean, Xtr.mean(axis=0))
        assert np.allclose(cell.scaler.std, Xtr.std(axis=0))
        assert np.allclose(cell.test.features, (raw.features[cell.test_idx] - Xtr.mean(axis=0)) / Xtr.std(axis=0))
        assert np.intersect1d(cell.train_idx, cell.test_idx).size == 0
        if isinstance(cell.model, QbbModel):
            for h in cell.model.learners:
                hist = h.inertia_history
                assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))


def test_regression_experiment():
    ds = synthesize_blobs(20, 2, 3, 0.5, 0, task=NUMERIC)
    cfg = ExperimentConfig("unused.csv", task=NUMERIC, B_values=(2, 4), delta_values=(0.5,), repeats=2, k=3,
                           distance=DistanceMode.euclidean())
    rows = run_experiment(cfg, ds)
    assert len(rows) == 4 and all(r.metric_kind == "mse" and r.test_metric >= 0 for r in rows)


def test_errors_carry_cell_coordinates(tmp_path, iris_cfg):
    with pytest.raises(ExperimentError, match="cannot load"):
        run_experiment(replace(iris_cfg, dataset=tmp_path / "missing.csv"))
    tiny = write_csv(tmp_path / "tiny.csv", ["a", "label"], [[i, i % 2] for i in range(12)])
    with pytest.raises(ExperimentError, match=r"delta=0\.1 .*repeat 0"):
        run_experiment(replace(iris_cfg, dataset=tiny))


def test_emit_csv(tmp_path):
    empty = emit_csv([], tmp_path / "e.csv")
    assert empty.read_text() == ",".join(ResultRow.columns()) + "\n"
    rows = [row(B=b, delta=d, repeat_index=r, test_metric=1 / 3) for r in range(5) for b in (8, 4) for d in (0.2, 0.1)]
    rows = rows * 8
    path = emit_csv(rows, tmp_path / "r.csv")
    data = path.read_bytes()
    assert data.count(b"\n") == 161 and b"\r" not in data
    assert b"0.333333" in data
    again = emit_csv(list(reversed(rows)), tmp_path / "s.csv")
    assert again.read_bytes() == data
    back = read_csv(path)
    assert [(r.delta, r.B, r.repeat_index) for r in back] == sorted((r.delta, r.B, r.repeat_index) for r in rows)
    (tmp_path / "file").write_text("x")
    with pytest.raises(OSError):
        emit_csv(rows, tmp_path / "file" / "r.csv")


def test_summarize():
    rows = [row(B=4, delta=d, repeat_index=r, test_metric=v) for d, r, v in [(0.1, 0, 0.8), (0.1, 1, 1.0), (0.2, 0, 0.6)]]
    by = summarize(rows)
    assert [(s.delta, s.mean_test, s.std_test, s.n_runs) for s in by] == [(0.1, 0.9, pytest.approx(0.1), 2), (0.2, 0.6, 0.0, 1)]
    flat = summarize(rows, by_delta=False)
    assert len(flat) == 1 and flat[0].mean_test == pytest.approx(0.8) and flat[0].delta is None


def test_plot(tmp_path):
    rows = [
        row(B=b, delta=d, repeat_index=r, test_metric=0.8 + 0.01 * b * d + 0.01 * r)
        for d in (0.1, 0.2, 0.3, 0.4) for b in (4, 8, 12) for r in range(3)
    ]
    path = emit_plot(rows, tmp_path / "p.svg")
    root = ET.parse(path).getroot()
    assert len(root.findall(f"{SVG}polyline")) == 4
    assert len(root.findall(f"{SVG}polygon")) == 4
    texts = [t.text for t in root.iter(f"{SVG}text")]
    assert "test accuracy" in texts and "number of base learners B" in texts
    again = emit_plot(list(reversed(rows)), tmp_path / "q.svg")
    assert again.read_bytes() == path.read_bytes()


def test_plot_single_repeat_has_flat_bands(tmp_path):
    rows = [row(B=b, delta=0.1, test_metric=0.5 + 0.01 * b) for b in (4, 8)]
    root = ET.parse(emit_plot(rows, tmp_path / "p.svg")).getroot()
    band = root.find(f"{SVG}polygon").get("points").split()
    line = root.find(f"{SVG}polyline").get("points").split()
    assert band[:2] == line and band[2:] == line[::-1]


def test_plot_errors(tmp_path):
    with pytest.raises(ValueError):
        emit_plot([], tmp_path / "p.svg")
    with pytest.raises(ValueError):
        emit_plot([row(), row(learner="dt_bagging")], tmp_path / "p.svg")


def test_cli_run(tmp_path, data_dir, capsys):
    argv = ["run", "--dataset", str(data_dir / "iris.csv"), "--learner", "qmeans_bagging", "--B", "8", "--delta", "0.2",
            "--k", "10", "--noise", "0.05", "--repeats", "5", "--seed", "42", "--out", str(tmp_path)]
    assert cli_main(argv) == 0
    out = tmp_path / "iris_qmeans_bagging.csv"
    assert out.read_text().count("\n") == 6
    assert str(out) in capsys.readouterr().out


def test_cli_usage_errors(tmp_path, data_dir, capsys):
    assert cli_main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err
    iris = str(data_dir / "iris.csv")
    assert cli_main(["run", "--dataset", iris, "--B", "4,x"]) == 2
    assert cli_main(["run", "--dataset", iris, "--distance", "cosine"]) == 2
    assert cli_main(["run", "--dataset", iris, "--repeats", "0", "--out", str(tmp_path)]) == 2
    assert "repeats" in capsys.readouterr().err
    assert cli_main(["run", "--dataset", iris, "--shots", "5", "--out", str(tmp_path)]) == 2
    assert cli_main(["run", "--dataset", iris, "--seed", str(2**64)]) == 2
    assert cli_main([]) == 2


def test_cli_failure_diagnostic(tmp_path, capsys):
    assert cli_main(["run", "--dataset", str(tmp_path / "none.csv"), "--out", str(tmp_path)]) == 1
    assert "none.csv" in capsys.readouterr().err


def test_cli_table2_sweep_plot(tmp_path, data_dir):
    iris = str(data_dir / "iris.csv")
    assert cli_main(["table2", "--dataset", iris, "--repeats", "1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "iris_table2.csv").read_text().splitlines()
    assert len(lines) == 1 + 24
    assert lines[0].startswith("dataset,base_learner,learner,n_classifiers")
    assert lines[1].startswith("iris,Supervised (DT),dt_bagging,4,")
    by_delta = (tmp_path / "iris_table2_by_delta.csv").read_text().splitlines()
    assert len(by_delta) == 1 + 24 * 4
    out = tmp_path / "sweep"
    argv = ["sweep", "--dataset", iris, "--learner", "dt_bagging,single_kmeans", "--B", "2,4", "--delta", "0.1,0.3",
            "--repeats", "2", "--distance", "euclidean", "--out", str(out)]
    assert cli_main(argv) == 0
    assert (out / "iris_dt_bagging.svg").exists() and (out / "iris_single_kmeans.svg").exists()
    plots = tmp_path / "plots"
    assert cli_main(["plot", "--results", str(out / "iris_sweep.csv"), "--out", str(plots)]) == 0
    assert sorted(p.name for p in plots.iterdir()) == ["iris_dt_bagging.svg", "iris_single_kmeans.svg"]


def test_cli_regression_and_shots(tmp_path):
    ds = synthesize_blobs(15, 2, 3, 0.5, 0, task=NUMERIC)
    path = write_csv(tmp_path / "reg.csv", ["a", "b", "target"],
                     [[*map(repr, x), repr(y)] for x, y in zip(ds.features.tolist(), ds.labels.tolist())])
    argv = ["run", "--dataset", str(path), "--task", "regress", "--k", "3", "--B", "2", "--delta", "0.5",
            "--repeats", "1", "--distance", "fidelity-shots", "--shots", "64", "--out", str(tmp_path)]
    assert cli_main(argv) == 0
    (result,) = read_csv(tmp_path / "reg_qmeans_bagging.csv")
    assert result.metric_kind == "mse"


def test_cli_timing_flag(tmp_path, data_dir):
    argv = ["run", "--dataset", str(data_dir / "iris.csv"), "--B", "2", "--delta", "0.2", "--repeats", "1",
            "--distance", "euclidean", "--timing", "--out", str(tmp_path)]
    assert cli_main(argv) == 0
    (result,) = read_csv(tmp_path / "iris_qmeans_bagging.csv")
    assert result.wall_time_ms > 0
