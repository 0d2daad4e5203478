"""``qbag`` command line: run, sweep, table2 and plot."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..clustering import EUCLIDEAN, FIDELITY_SHOTS, MODES, DistanceMode
from ..data import CLASS, NUMERIC, DataError
from . import report
from .config import (
    DEFAULT_B,
    DEFAULT_DELTAS,
    LEARNERS,
    QMEANS_BAGGING,
    TABLE2_LEARNERS,
    ConfigError,
    ExperimentConfig,
)
from .runner import ExperimentError, run_experiment, run_learners

log = logging.getLogger("qbag")

TASKS = {"class": CLASS, "regress": NUMERIC}


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _name_list(text: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in text.split(",") if v.strip())
    bad = [n for n in names if n not in LEARNERS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown learner {', '.join(bad) or text!r}; choose from {', '.join(LEARNERS)}")
    return names


def _u64(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _experiment_flags(p: argparse.ArgumentParser, distance_default: str, learners_flag: str):
    p.add_argument("--dataset", required=True, type=Path, help="CSV file with numeric features and a label column")
    p.add_argument("--label-column", default=None, help="label column (default: 'label' or 'target')")
    p.add_argument("--task", choices=sorted(TASKS), default="class")
    if learners_flag == "one":
        p.add_argument("--learner", choices=LEARNERS, default=QMEANS_BAGGING)
    elif learners_flag == "many":
        p.add_argument("--learner", type=_name_list, default=TABLE2_LEARNERS, help="comma separated learner names")
    p.add_argument("--B", type=_int_list, default=DEFAULT_B, dest="B", help="comma separated ensemble sizes")
    p.add_argument("--delta", type=_float_list, default=DEFAULT_DELTAS, help="comma separated seeding exponents")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--noise", type=float, default=0.05, help="training label noise rate")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--distance", choices=MODES, default=distance_default)
    p.add_argument("--shots", type=int, default=None, help="shots per SWAP test in fidelity-shots mode")
    p.add_argument("--bootstrap-fraction", type=float, default=0.5)
    p.add_argument("--seed", type=_u64, default=42)
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--timing", action="store_true", help="record wall_time_ms (makes the CSV non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbag", description="Quantum bootstrapped bagging benchmarks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{run,sweep,table2,plot}")

    p = sub.add_parser("run", help="one learner over a (delta, B, repeat) grid")
    _experiment_flags(p, distance_default="fidelity-exact", learners_flag="one")

    p = sub.add_parser("sweep", help="several learners over a grid, with one plot per learner")
    _experiment_flags(p, distance_default="fidelity-exact", learners_flag="many")

    p = sub.add_parser("table2", help="DT, KMeans and QMeans bagging compared across B, delta averaged")
    _experiment_flags(p, distance_default=EUCLIDEAN, learners_flag="none")

    p = sub.add_parser("plot", help="SVG chart(s) from a results CSV")
    p.add_argument("--results", required=True, type=Path)
    p.add_argument("--out", type=Path, default=Path("results"))
    return parser


def _config(args, learner: str) -> ExperimentConfig:
    if args.shots is not None and args.distance != FIDELITY_SHOTS:
        raise ConfigError("--shots only applies to --distance fidelity-shots")
    return ExperimentConfig(
        dataset=args.dataset,
        label_column=args.label_column,
        task=TASKS[args.task],
        learner=learner,
        B_values=args.B,
        delta_values=args.delta,
        k=args.k,
        noise_rate=args.noise,
        repeats=args.repeats,
        test_fraction=args.test_fraction,
        distance=DistanceMode(args.distance, args.shots),
        bootstrap_fraction=args.bootstrap_fraction,
        master_seed=args.seed,
        output_dir=args.out,
        record_timing=args.timing,
    )


def _stem(config: ExperimentConfig) -> str:
    return config.dataset.stem


def _plots(rows, out: Path, stem: str | None = None) -> list[Path]:
    paths = []
    for dataset, learner in sorted({(r.dataset, r.learner) for r in rows}):
        chosen = [r for r in rows if r.dataset == dataset and r.learner == learner]
        paths.append(report.emit_plot(chosen, out / f"{stem or dataset}_{learner}.svg"))
    return paths


def cmd_run(args) -> list[Path]:
    config = _config(args, args.learner)
    rows = run_experiment(config)
    return [report.emit_csv(rows, config.output_dir / f"{_stem(config)}_{config.learner}.csv")]


def cmd_sweep(args) -> list[Path]:
    config = _config(args, args.learner[0])
    rows = run_learners(config, args.learner)
    stem = _stem(config)
    written = [report.emit_csv(rows, config.output_dir / f"{stem}_sweep.csv")]
    written.append(report.emit_summary(report.summarize(rows), config.output_dir / f"{stem}_sweep_summary.csv"))
    return written + _plots(rows, config.output_dir, stem)


def cmd_table2(args) -> list[Path]:
    config = _config(args, TABLE2_LEARNERS[0])
    rows = run_learners(config, TABLE2_LEARNERS)
    stem, out = _stem(config), config.output_dir
    return [
        report.emit_csv(rows, out / f"{stem}_table2_rows.csv"),
        report.emit_table2(report.summarize(rows, by_delta=False), out / f"{stem}_table2.csv", TABLE2_LEARNERS),
        report.emit_summary(report.summarize(rows, by_delta=True), out / f"{stem}_table2_by_delta.csv"),
    ]


def cmd_plot(args) -> list[Path]:
    return _plots(report.read_csv(args.results), args.out)


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "table2": cmd_table2, "plot": cmd_plot}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        written = COMMANDS[args.command](args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"qbag {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ExperimentError, DataError, OSError, ValueError) as exc:
        print(f"qbag {args.command}: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def main():
    sys.exit(cli_main())
