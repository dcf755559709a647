"""Render fockgen CSV outputs into static figures.

Driven by a JSON figure spec:

    {
      "kind": "curve" | "heatmap" | "bars" | "surface",
      "input": "path/to/table.csv",
      "output": "figure.png",
      "x_label": "...", "y_label": "...", "title": "...",   # optional
      "x_column": "...",                       # default: first column
      "y_columns": ["...", ...],               # curve/bars, default: the rest
      "value_column": "...",                   # heatmap/surface, default: third
      "log_y": false,                          # curve only
      "peaks_csv": "wigner_peaks.csv",         # surface only, optional
      "peak_state": "actual"                   #   row selector in peaks_csv
    }

The renderer computes no physics: every number it draws exists verbatim in
an input CSV (including marked peak locations, which come from the peaks
file written by the primary CLI).  Styling is pinned by the bundled
mplstyle so identical inputs produce byte-identical images.

Usage: render --spec figure.json
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from importlib import resources
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpecError", "load_table", "render", "main"]

KINDS = ("curve", "heatmap", "bars", "surface")


class FigureSpecError(ValueError):
    """The figure spec or an input CSV does not match expectations."""


def load_table(path) -> tuple[dict, list[str], np.ndarray]:
    """Read a fockgen CSV: metadata row, header row, float data matrix."""
    path = Path(path)
    if not path.exists():
        raise FigureSpecError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise FigureSpecError(f"{path}: file is empty")
    meta: dict = {}
    if rows and rows[0] and rows[0][0] == "meta":
        for cell in rows[0][1:]:
            if "=" in cell:
                key, val = cell.split("=", 1)
                meta[key] = val
        rows = rows[1:]
    if not rows:
        raise FigureSpecError(f"{path}: missing header row")
    header = rows[0]
    data_rows = rows[1:]
    if not data_rows:
        raise FigureSpecError(f"{path}: no data rows")
    try:
        data = np.array([[float(cell) for cell in row[: len(header)]] for row in data_rows])
    except ValueError:
        # Keep non-numeric trailing columns (e.g. a reason column) as NaN.
        data = np.full((len(data_rows), len(header)), np.nan)
        for i, row in enumerate(data_rows):
            for j in range(len(header)):
                try:
                    data[i, j] = float(row[j])
                except (ValueError, IndexError):
                    pass
    return meta, header, data


def _columns(header: list[str], wanted: list[str], path) -> list[int]:
    missing = [c for c in wanted if c not in header]
    if missing:
        raise FigureSpecError(
            f"{path}: missing column(s) {missing}; available columns are {header}"
        )
    return [header.index(c) for c in wanted]


def _pivot(x, y, v):
    """Arrange (x, y, value) triples onto their rectangular grid."""
    xs = np.unique(x)
    ys = np.unique(y)
    if xs.size * ys.size != x.size:
        raise FigureSpecError(
            f"grid is not rectangular: {xs.size} x {ys.size} != {x.size} points"
        )
    grid = np.full((xs.size, ys.size), np.nan)
    ix = np.searchsorted(xs, x)
    iy = np.searchsorted(ys, y)
    grid[ix, iy] = v
    return xs, ys, grid


def _decorate(ax, spec):
    if spec.get("x_label"):
        ax.set_xlabel(spec["x_label"])
    if spec.get("y_label"):
        ax.set_ylabel(spec["y_label"])
    if spec.get("title"):
        ax.set_title(spec["title"])


def _render_curve(ax, spec, header, data, path):
    x_col = spec.get("x_column", header[0])
    y_cols = spec.get("y_columns") or [c for c in header if c != x_col]
    idx = _columns(header, [x_col] + y_cols, path)
    x = data[:, idx[0]]
    for name, j in zip(y_cols, idx[1:]):
        ax.plot(x, data[:, j], label=name)
    if spec.get("log_y"):
        ax.set_yscale("log")
    if len(y_cols) > 1:
        ax.legend()


def _render_bars(ax, spec, header, data, path):
    x_col = spec.get("x_column", header[0])
    y_cols = spec.get("y_columns") or [c for c in header if c != x_col]
    idx = _columns(header, [x_col] + y_cols, path)
    x = data[:, idx[0]]
    width = 0.8 / len(y_cols)
    for pos, (name, j) in enumerate(zip(y_cols, idx[1:])):
        ax.bar(x + (pos - (len(y_cols) - 1) / 2.0) * width, data[:, j], width=width, label=name)
    if len(y_cols) > 1:
        ax.legend()


def _render_field(ax, fig, spec, header, data, path, mark_peak: bool):
    x_col = spec.get("x_column", header[0])
    y_col = spec.get("y_column", header[1] if len(header) > 1 else header[0])
    v_col = spec.get("value_column", header[2] if len(header) > 2 else header[-1])
    ix, iy, iv = _columns(header, [x_col, y_col, v_col], path)
    xs, ys, grid = _pivot(data[:, ix], data[:, iy], data[:, iv])
    mesh = ax.pcolormesh(xs, ys, grid.T, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=v_col)
    ax.set_aspect("equal" if mark_peak else "auto")
    if mark_peak and spec.get("peaks_csv"):
        _, pk_header, pk_data = load_table(spec["peaks_csv"])
        jx, jy = _columns(pk_header, ["x_peak", "y_peak"], spec["peaks_csv"])
        row = 0
        if spec.get("peak_state"):
            names = _peak_names(spec["peaks_csv"])
            if spec["peak_state"] not in names:
                raise FigureSpecError(
                    f"peak_state {spec['peak_state']!r} not found in {spec['peaks_csv']}; "
                    f"states are {names}"
                )
            row = names.index(spec["peak_state"])
        ax.plot([pk_data[row, jx]], [pk_data[row, jy]], marker="+", markersize=12,
                color="black", linestyle="none")
        ax.axvline(pk_data[row, jx], color="black", linewidth=0.7, linestyle="--")


def _peak_names(path) -> list[str]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and rows[0][0] == "meta":
        rows = rows[1:]
    header, data = rows[0], rows[1:]
    col = header.index("state")
    return [row[col] for row in data]


def render(spec: dict) -> Path:
    """Render one figure described by a spec dict; returns the output path."""
    kind = spec.get("kind")
    if kind not in KINDS:
        raise FigureSpecError(f"kind must be one of {KINDS}, got {kind!r}")
    for key in ("input", "output"):
        if not spec.get(key):
            raise FigureSpecError(f"spec is missing required key {key!r}")

    meta, header, data = load_table(spec["input"])

    style = resources.files("fockgen_figures").joinpath("style.mplstyle")
    with plt.style.context(str(style)):
        fig, ax = plt.subplots()
        if kind == "curve":
            _render_curve(ax, spec, header, data, spec["input"])
        elif kind == "bars":
            _render_bars(ax, spec, header, data, spec["input"])
        else:
            _render_field(ax, fig, spec, header, data, spec["input"], mark_peak=(kind == "surface"))
        _decorate(ax, spec)
        out = Path(spec["output"])
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, metadata={"Software": None})
        plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--spec", required=True, help="JSON figure spec (file path)")
    args = parser.parse_args(argv)
    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
        specs = spec if isinstance(spec, list) else [spec]
        for one in specs:
            out = render(one)
            print(f"wrote {out}")
    except (FigureSpecError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
