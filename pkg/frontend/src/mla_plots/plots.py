"""Figure builders over solver output files.

All rendering is headless (Agg) and deterministic: fixed styles, fixed
figure geometry, and pinned PNG metadata so identical inputs produce
byte-identical images.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import MissingColumns, read_csv_columns, require, snapshot_kind

_PNG_META = {"Software": "mla-plots"}
_DPI = 130


@dataclass(frozen=True)
class PlotJob:
    """One rendering request: input table, kind, field, output path."""

    input_path: str
    kind: str  # convergence | line | heatmap
    output_path: str
    field: str | None = None

    def run(self) -> str:
        if self.kind == "convergence":
            return plot_convergence(self.input_path, self.output_path)
        if self.kind == "line":
            fields = [self.field] if self.field else None
            return plot_line(self.input_path, self.output_path, fields=fields)
        if self.kind == "heatmap":
            if not self.field:
                raise MissingColumns("heatmap needs --field")
            return plot_heatmap(self.input_path, self.output_path, self.field)
        raise ValueError(f"unknown plot kind {self.kind!r}")


def _save(fig, path: str) -> str:
    fig.savefig(path, dpi=_DPI, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_convergence(table_csv: str, out_path: str) -> str:
    """Log-log error vs grid spacing with slope-2 and slope-4 guides."""
    table = read_csv_columns(table_csv)
    h, err = require(table, ["h", "err"], table_csv)
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.loglog(h, err, "o-", color="tab:blue", label="max error")
    href = np.array([min(h), max(h)])
    anchor = err[np.argmax(h)]
    for slope, style in ((2, "--"), (4, ":")):
        guide = anchor * (href / max(h)) ** slope
        ax.loglog(href, guide, style, color="gray",
                  label=f"slope {slope}")
    ax.set_xlabel("grid spacing h")
    ax.set_ylabel("max-norm error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, out_path)


def plot_line(snapshot_csv: str, out_path: str, fields=None,
              axis: str = "x") -> str:
    """Overlay selected component columns along one coordinate axis.

    For 2D snapshots the slice nearest the low edge of the other axis is
    used (the benchmark extracts the profile along y = 0).
    """
    table = read_csv_columns(snapshot_csv)
    if axis not in table:
        raise MissingColumns(f"{snapshot_csv}: no coordinate {axis!r}")
    coord_names = [n for n in ("x", "y") if n in table]
    if fields is None:
        fields = [n for n in table if n not in coord_names]
    cols = require(table, fields, snapshot_csv)
    s = table[axis]
    mask = np.ones(len(s), dtype=bool)
    for other in coord_names:
        if other != axis:
            mask &= table[other] == table[other].min()
    order = np.argsort(s[mask], kind="stable")
    fig, ax = plt.subplots(figsize=(6.2, 4.0))
    for name, col in zip(fields, cols):
        ax.plot(s[mask][order], col[mask][order], label=name, linewidth=1.2)
    ax.set_xlabel(axis)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, out_path)


def plot_heatmap(snapshot_csv: str, out_path: str, field: str) -> str:
    """2D field rendered as an image; rejects 1D snapshots."""
    table = read_csv_columns(snapshot_csv)
    if snapshot_kind(table) != 2:
        raise MissingColumns(f"{snapshot_csv}: heatmap needs a 2D snapshot")
    x, y, values = require(table, ["x", "y", field], snapshot_csv)
    xs = np.unique(x)
    ys = np.unique(y)
    grid = values.reshape(len(xs), len(ys))
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    im = ax.imshow(grid.T, origin="lower", aspect="auto",
                   extent=(xs[0], xs[-1], ys[0], ys[-1]), cmap="viridis")
    fig.colorbar(im, ax=ax, label=field)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    return _save(fig, out_path)
