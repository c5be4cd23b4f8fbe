"""Render benchmark CSV files into static figures.

Four figure kinds mirror the benchmark harness outputs: grouped runtime
bars on a log axis, estimate-vs-truth scatter with a y = x reference line,
a log-log CCDF curve, and per-percentile forward/reverse balance lines.
Rendering is headless (Agg) and deterministic: identical CSV input yields
byte-identical PNG output.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("runtime", "scatter", "ccdf", "balance")

_REQUIRED_COLUMNS = {
    "runtime": ("graph", "algorithm", "total_ms"),
    "scatter": ("estimate", "truth"),
    "ccdf": ("threshold", "fraction"),
    "balance": ("percentile", "algorithm", "forward_ms", "reverse_ms"),
}

_STYLE = {
    "figure.figsize": (6.4, 4.8),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


@dataclass
class FigureSpec:
    """What to render: input CSV, figure kind, output path, axis scales."""

    input: str
    kind: str
    output: str
    log_x: bool = False
    log_y: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {', '.join(KINDS)}")


class MissingColumn(ValueError):
    def __init__(self, column, path):
        super().__init__(f"column {column!r} missing from {path}")
        self.column = column


def _read_rows(path, kind):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in _REQUIRED_COLUMNS[kind]:
            if col not in header:
                raise MissingColumn(col, path)
        return list(reader)


def _draw_runtime(ax, rows, spec):
    groups = {}
    for r in rows:
        key = (r["graph"], r["algorithm"])
        groups.setdefault(key, []).append(float(r["total_ms"]))
    graphs = sorted({g for g, _ in groups})
    algos = sorted({a for _, a in groups})
    width = 0.8 / len(algos)
    for j, algo in enumerate(algos):
        xs, ys = [], []
        for i, gname in enumerate(graphs):
            vals = groups.get((gname, algo))
            if vals:
                xs.append(i + (j - (len(algos) - 1) / 2) * width)
                ys.append(sum(vals) / len(vals))
        ax.bar(xs, ys, width=width, label=algo)
    ax.set_xticks(range(len(graphs)))
    ax.set_xticklabels(graphs, rotation=15, ha="right")
    ax.set_yscale("log")
    ax.set_ylabel("mean query time (ms)")
    ax.legend()


def _draw_scatter(ax, rows, spec):
    xs, ys = [], []
    for r in rows:
        if r["truth"] in ("", None):
            continue
        xs.append(float(r["truth"]))
        ys.append(float(r["estimate"]))
    ax.scatter(xs, ys, s=12, alpha=0.6, edgecolors="none")
    lo = min(xs) if xs else 1e-9
    hi = max(xs) if xs else 1.0
    lo, hi = min(lo, min(ys, default=lo)), max(hi, max(ys, default=hi))
    if lo <= 0:
        lo = min(x for x in xs + ys if x > 0) if spec.log_x else lo
    ax.plot([lo, hi], [lo, hi], "k--", linewidth=1, label="y = x")
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("true value")
    ax.set_ylabel("estimate")
    ax.legend()


def _draw_ccdf(ax, rows, spec):
    pts = [(float(r["threshold"]), float(r["fraction"])) for r in rows]
    pts = [(t, f) for t, f in pts if t > 0 and f > 0]  # log-log axes
    ax.plot([t for t, _ in pts], [f for _, f in pts], marker=".")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("threshold")
    ax.set_ylabel("fraction of pairs at or above")


def _draw_balance(ax, rows, spec):
    series = {}
    for r in rows:
        algo = r["algorithm"]
        q = int(r["percentile"])
        series.setdefault((algo, "forward"), []).append((q, float(r["forward_ms"])))
        series.setdefault((algo, "reverse"), []).append((q, float(r["reverse_ms"])))
    for (algo, side), pts in sorted(series.items()):
        pts.sort()
        style = "-" if side == "forward" else "--"
        ax.plot([q for q, _ in pts], [v for _, v in pts], style,
                label=f"{algo} {side}")
    ax.set_yscale("log")
    ax.set_xlabel("target PageRank percentile")
    ax.set_ylabel("time (ms)")
    ax.legend()


_DRAWERS = {
    "runtime": _draw_runtime,
    "scatter": _draw_scatter,
    "ccdf": _draw_ccdf,
    "balance": _draw_balance,
}


def build_figure(spec: FigureSpec):
    """Build (but do not save) the matplotlib figure for a spec."""
    rows = _read_rows(spec.input, spec.kind)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        _DRAWERS[spec.kind](ax, rows, spec)
        fig.tight_layout()
    return fig


def render(spec: FigureSpec):
    """Render the figure to spec.output; returns the output path.

    PNG metadata is stripped so identical input produces byte-identical
    files across runs.
    """
    fig = build_figure(spec)
    try:
        fig.savefig(spec.output, format="png", metadata={"Software": None})
    finally:
        plt.close(fig)
    return spec.output


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="fastppr-render",
        description="Render fastppr benchmark CSVs into figures")
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="input", required=True, help="input CSV")
    ap.add_argument("--out", dest="output", required=True, help="output PNG")
    ap.add_argument("--log-x", action="store_true")
    ap.add_argument("--log-y", action="store_true")
    args = ap.parse_args(argv)
    try:
        render(FigureSpec(input=args.input, kind=args.kind,
                          output=args.output, log_x=args.log_x,
                          log_y=args.log_y))
    except Exception as exc:
        print(f"fastppr-render: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
