"""Render spectral-hull CSV reports as static figures.

Two input schemas are recognized by header:
  - convergence tables (N, metric, value): one metric filtered to a
    log-log value-vs-N series;
  - hull tables (cluster, size, weight, m, chart_label, chart_coord):
    scatter of chart coordinate against the multiplier, with an optional
    cos(2 pi t) or pi * omega reference curve.

Rendering is deterministic for identical input: fixed figure geometry,
pinned SVG hash salt, no date metadata.
"""

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "spectral-hull-plots"

import matplotlib.pyplot as plt
import numpy as np

# metric names of the spectral-hull converge CSV interface
METRIC_REGISTRY = (
    "isometry_defect",
    "intertwine_defect",
    "arc_measure_err",
    "g0_measure_err",
    "ft_rel_err",
    "plancherel_err",
    "pvm_defect",
    "xn_residual",
    "covering_number",
    "staircase_lp_err",
)

REFERENCE_TAGS = ("cos", "linear-pi", "none")

SCATTER_COLOR = "#1f77b4"
REFERENCE_COLOR = "#ff7f0e"

CONVERGENCE_HEADER = ["N", "metric", "value"]
HULL_HEADER = ["cluster", "size", "weight", "m", "chart_label", "chart_coord"]


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    metric: str = ""
    reference: str = "none"
    out_path: str = "figure.svg"
    fmt: str = "svg"

    def __post_init__(self):
        if self.reference not in REFERENCE_TAGS:
            raise RenderError(
                f"unknown reference tag {self.reference!r}; choose from {REFERENCE_TAGS}"
            )
        if self.fmt not in ("svg", "png"):
            raise RenderError("format must be svg or png")


def _read_rows(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise RenderError(f"cannot read CSV: {exc}") from exc
    if not rows:
        raise RenderError("CSV is empty (no header row)")
    return rows


def _new_figure():
    return plt.subplots(figsize=(6.4, 4.8), dpi=100)


def _save(fig, spec):
    metadata = {"Date": None} if spec.fmt == "svg" else {}
    fig.savefig(spec.out_path, format=spec.fmt, metadata=metadata)
    plt.close(fig)


def _render_convergence(rows, spec):
    if spec.metric not in METRIC_REGISTRY:
        raise RenderError(
            f"unknown metric {spec.metric!r}; registry: {', '.join(METRIC_REGISTRY)}"
        )
    ns, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise RenderError(f"malformed convergence row at line {lineno}")
        if row[1] == spec.metric:
            ns.append(float(row[0]))
            values.append(float(row[2]))
    fig, ax = _new_figure()
    if ns:
        order = np.argsort(ns)
        ns = np.asarray(ns)[order]
        values = np.asarray(values)[order]
        positive = values > 0
        ax.plot(ns, np.where(positive, values, np.nan), "o-",
                color=SCATTER_COLOR, label=spec.metric)
        if np.any(positive):
            ax.set_yscale("log")
        ax.set_xscale("log")
        ax.legend(loc="best")
    ax.set_xlabel("N")
    ax.set_ylabel(spec.metric)
    ax.set_title(f"{spec.metric} vs N")
    _save(fig, spec)


def _render_hull(rows, spec):
    coords, mults = [], []
    labels = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 6:
            raise RenderError(f"malformed hull row at line {lineno}")
        if row[4]:
            labels.add(row[4])
        coords.append(float(row[5]) if row[5] else np.nan)
        mults.append(float(row[3]))
    fig, ax = _new_figure()
    coords = np.asarray(coords)
    mults = np.asarray(mults)
    keep = ~np.isnan(coords)
    ax.plot(coords[keep], mults[keep], ".", color=SCATTER_COLOR, markersize=3)
    if spec.reference != "none" and np.any(keep):
        # reference drawn above the scatter so the residual band stays visible
        lo, hi = float(coords[keep].min()), float(coords[keep].max())
        xs = np.linspace(lo, hi, 512)
        ys = np.cos(2.0 * np.pi * xs) if spec.reference == "cos" else np.pi * xs
        ax.plot(xs, ys, "-", color=REFERENCE_COLOR, linewidth=1.0)
    label = labels.pop() if len(labels) == 1 else "chart coordinate"
    ax.set_xlabel("t" if label == "circle" else "omega" if label == "line" else label)
    ax.set_ylabel("multiplier")
    ax.set_title("hull multiplier vs chart coordinate")
    _save(fig, spec)


def render(spec):
    """Render one figure per the spec; returns the output path."""
    rows = _read_rows(spec.csv_path)
    header = rows[0]
    if header == CONVERGENCE_HEADER:
        _render_convergence(rows, spec)
    elif header == HULL_HEADER:
        _render_hull(rows, spec)
    else:
        raise RenderError(
            "unrecognized CSV header; expected a convergence table "
            f"{CONVERGENCE_HEADER} or a hull table {HULL_HEADER}"
        )
    return spec.out_path


def main(argv=None):
    parser = argparse.ArgumentParser(prog="spectral-hull-render")
    parser.add_argument("--csv", required=True)
    parser.add_argument("--metric", default="")
    parser.add_argument("--ref", default="none", choices=REFERENCE_TAGS)
    parser.add_argument("--out", required=True)
    parser.add_argument("--png", action="store_true",
                        help="write PNG instead of the default SVG")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            csv_path=args.csv,
            metric=args.metric,
            reference=args.ref,
            out_path=args.out,
            fmt="png" if args.png else "svg",
        )
        render(spec)
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
