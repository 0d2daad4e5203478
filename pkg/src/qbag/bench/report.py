"""CSV tables and SVG line charts for benchmark results."""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, fields
from pathlib import Path
from xml.sax.saxutils import escape

from ..metrics import summarize_repeats
from .config import DISPLAY_NAMES, ResultRow
from .runner import sort_rows

FLOAT_FORMAT = "{:.6f}"

_INT_FIELDS = {"B", "repeat_index", "seed"}
_STR_FIELDS = {"dataset", "learner", "metric_kind"}


def _cell(value):
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    return str(value)


def write_table(path, header, rows) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(rows, path) -> Path:
    """One line per :class:`ResultRow`, floats at six decimals, canonical order."""
    names = ResultRow.columns()
    return write_table(path, names, ([getattr(r, n) for n in names] for r in sort_rows(rows)))


def read_csv(path) -> list[ResultRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(ResultRow.columns()) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        out = []
        for rec in reader:
            kwargs = {}
            for f in fields(ResultRow):
                raw = rec[f.name]
                if f.name in _INT_FIELDS:
                    kwargs[f.name] = int(raw)
                elif f.name in _STR_FIELDS:
                    kwargs[f.name] = raw
                else:
                    kwargs[f.name] = float(raw)
            out.append(ResultRow(**kwargs))
    return out


@dataclass(frozen=True)
class SummaryRow:
    dataset: str
    learner: str
    B: int
    delta: float | None
    metric_kind: str
    mean_train: float
    mean_test: float
    std_test: float
    mean_ensemble_variance: float
    n_runs: int


def summarize(rows, by_delta: bool = True) -> list[SummaryRow]:
    """Mean and population std of the test metric per (learner, B[, delta])."""
    groups = defaultdict(list)
    for row in rows:
        key = (row.dataset, row.learner, row.B, row.delta if by_delta else None, row.metric_kind)
        groups[key].append(row)
    out = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], -1.0 if k[3] is None else k[3])):
        group = groups[key]
        test = summarize_repeats(r.test_metric for r in group)
        out.append(
            SummaryRow(
                *key,
                mean_train=summarize_repeats(r.train_metric for r in group).mean,
                mean_test=test.mean,
                std_test=test.std,
                mean_ensemble_variance=summarize_repeats(r.mean_ensemble_variance for r in group).mean,
                n_runs=test.n_repeats,
            )
        )
    return out


def emit_summary(summary, path) -> Path:
    header = [f.name for f in fields(SummaryRow)]
    body = ([("" if getattr(s, h) is None else getattr(s, h)) for h in header] for s in summary)
    return write_table(path, header, body)


def emit_table2(summary, path, learners) -> Path:
    """Table-shaped summary: one row per (base learner, number of classifiers)."""
    order = {name: i for i, name in enumerate(learners)}
    chosen = sorted((s for s in summary if s.learner in order), key=lambda s: (s.dataset, order[s.learner], s.B))
    header = ["dataset", "base_learner", "learner", "n_classifiers", "metric_kind", "mean_test", "std_test", "n_runs"]
    body = (
        [s.dataset, DISPLAY_NAMES[s.learner], s.learner, s.B, s.metric_kind, s.mean_test, s.std_test, s.n_runs]
        for s in chosen
    )
    return write_table(path, header, body)


# --- SVG ------------------------------------------------------------------

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 72, 150, 48, 60


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 5):
    if hi == lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def emit_plot(rows, path, group_by: str = "delta", title: str | None = None) -> Path:
    """Mean test metric against B with a +-1 std band, one series per delta.

    ``rows`` must come from a single dataset and learner.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    if group_by != "delta":
        raise ValueError("only group_by='delta' is supported")
    if len({(r.dataset, r.learner) for r in rows}) != 1:
        raise ValueError("emit_plot takes rows of one dataset and one learner")
    summary = summarize(rows, by_delta=True)
    metric = rows[0].metric_kind
    series = defaultdict(list)
    for s in summary:
        series[s.delta].append(s)
    xs = sorted({s.B for s in summary})
    lows = [s.mean_test - s.std_test for s in summary]
    highs = [s.mean_test + s.std_test for s in summary]
    y_lo, y_hi = min(lows), max(highs)
    pad = 0.05 * (y_hi - y_lo) if y_hi > y_lo else max(abs(y_hi) * 0.05, 0.01)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = xs[0], xs[-1]
    plot_w, plot_h = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (0.5 if x_hi == x_lo else (x - x_lo) / (x_hi - x_lo)) * plot_w

    def py(y):
        return TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    title = title or f"{DISPLAY_NAMES.get(rows[0].learner, rows[0].learner)} on {rows[0].dataset}"
    ylabel = "test accuracy" if metric == "accuracy" else "test MSE"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>',
    ]
    for x in xs:
        out.append(f'<line x1="{_fmt(px(x))}" y1="{TOP + plot_h}" x2="{_fmt(px(x))}" y2="{TOP + plot_h + 5}" stroke="#333"/>')
        out.append(f'<text x="{_fmt(px(x))}" y="{TOP + plot_h + 18}" text-anchor="middle">{x}</text>')
    for y in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{LEFT - 5}" y1="{_fmt(py(y))}" x2="{LEFT + plot_w}" y2="{_fmt(py(y))}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_fmt(py(y) + 4)}" text-anchor="end">{y:.4g}</text>')
    out.append(f'<text x="{LEFT + plot_w / 2:.2f}" y="{HEIGHT - 16}" text-anchor="middle">number of base learners B</text>')
    out.append(
        f'<text x="18" y="{TOP + plot_h / 2:.2f}" text-anchor="middle" transform="rotate(-90 18 {TOP + plot_h / 2:.2f})">{ylabel}</text>'
    )
    for i, delta in enumerate(sorted(series)):
        pts = sorted(series[delta], key=lambda s: s.B)
        color = PALETTE[i % len(PALETTE)]
        upper = [f"{_fmt(px(s.B))},{_fmt(py(s.mean_test + s.std_test))}" for s in pts]
        lower = [f"{_fmt(px(s.B))},{_fmt(py(s.mean_test - s.std_test))}" for s in reversed(pts)]
        out.append(f'<polygon class="band" points="{" ".join(upper + lower)}" fill="{color}" fill-opacity="0.18" stroke="none"/>')
        line = " ".join(f"{_fmt(px(s.B))},{_fmt(py(s.mean_test))}" for s in pts)
        out.append(f'<polyline class="series" data-delta="{delta:g}" points="{line}" fill="none" stroke="{color}" stroke-width="2"/>')
        for s in pts:
            out.append(f'<circle cx="{_fmt(px(s.B))}" cy="{_fmt(py(s.mean_test))}" r="3" fill="{color}"/>')
        ly = TOP + 16 + 20 * i
        out.append(f'<line x1="{LEFT + plot_w + 16}" y1="{ly}" x2="{LEFT + plot_w + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + plot_w + 46}" y="{ly + 4}">delta = {delta:g}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
