"""Figure rendering: deterministic SVG plots from result CSVs."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "isl-lab"

PLOT_KINDS = ("density-overlay", "loss-curve", "contour")


def _load(csv_path):
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    if data.dtype.names is None:
        raise ValueError(f"{csv_path}: no CSV header")
    return data


def _save(fig, out_path):
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_plot(csv_path, kind: str, out_path) -> None:
    """Render a CSV to an SVG; the output is byte-stable for fixed input."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"kind must be one of {PLOT_KINDS}")
    data = _load(csv_path)
    names = data.dtype.names

    if kind == "density-overlay":
        if names[0] != "x" or len(names) < 2:
            raise ValueError("density-overlay needs columns: x, then density columns")
        fig, ax = plt.subplots(figsize=(6, 4))
        for col in names[1:]:
            ax.plot(data["x"], data[col], label=col)
        ax.set_xlabel("x")
        ax.set_ylabel("density")
        ax.legend()
        _save(fig, out_path)
    elif kind == "loss-curve":
        if "epoch" not in names or "loss" not in names:
            raise ValueError("loss-curve needs columns: epoch, loss")
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(data["epoch"], data["loss"])
        ax.set_xlabel("epoch")
        ax.set_ylabel("loss")
        _save(fig, out_path)
    else:
        if names[:2] != ("x", "y") or len(names) < 3:
            raise ValueError("contour needs columns: x, y, value")
        xs = np.unique(data["x"])
        ys = np.unique(data["y"])
        z = np.full((len(ys), len(xs)), np.nan)
        xi = np.searchsorted(xs, data["x"])
        yi = np.searchsorted(ys, data["y"])
        z[yi, xi] = data[names[2]]
        if np.any(np.isnan(z)):
            raise ValueError("contour CSV does not cover a full grid")
        fig, ax = plt.subplots(figsize=(5, 5))
        cs = ax.contour(xs, ys, z, levels=10)
        ax.clabel(cs, inline=True, fontsize=7)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        _save(fig, out_path)
