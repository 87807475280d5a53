"""Deterministic figure rendering from CSV + manifest artifacts.

The manifest's sha256 digests are verified before anything is read, every
style knob is pinned (size, dpi, fonts, colors), and the PNG is written
without software/date metadata, so re-rendering identical artifacts yields
identical image bytes.
"""

from __future__ import annotations

import csv
import hashlib
import os
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .recipes import RECIPES, FigureRecipe  # noqa: E402


class RenderError(RuntimeError):
    """Missing artifact, failed hash check or column mismatch."""


_SOLID_COLORS = ("#1f77b4", "#2ca02c", "#9467bd")
_DASHED_COLORS = ("#d62728", "#ff7f0e", "#8c564b")

_RC = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "svg.hashsalt": "plotviz",
}


def verify_manifest(artifact_dir: str, recipe: FigureRecipe) -> None:
    """Check that every CSV the recipe reads is listed in the manifest and
    still has the recorded sha256."""
    man_path = os.path.join(artifact_dir, recipe.manifest)
    if not os.path.exists(man_path):
        raise RenderError(f"missing manifest {man_path}")
    with open(man_path, "rb") as fh:
        try:
            manifest = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise RenderError(f"unreadable manifest {man_path}: {exc}") from exc
    listed = manifest.get("artifacts", {})
    for name in recipe.files:
        path = os.path.join(artifact_dir, name)
        if not os.path.exists(path):
            raise RenderError(f"missing artifact {path}")
        if name not in listed:
            raise RenderError(f"artifact {name} is not listed in {man_path}")
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        if digest != listed[name]:
            raise RenderError(
                f"hash mismatch for {path}: manifest records "
                f"{listed[name][:12]}..., file has {digest[:12]}...")


def read_columns(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise RenderError(f"empty artifact {path}")
    header, data = rows[0], rows[1:]
    return {name: np.array([row[j] for row in data], dtype=float)
            for j, name in enumerate(header)
            if _is_numeric(data, j)}


def _is_numeric(data, j) -> bool:
    try:
        for row in data:
            float(row[j])
    except ValueError:
        return False
    return True


def _column(tables: dict[str, dict[str, np.ndarray]], file: str,
            name: str) -> np.ndarray:
    cols = tables[file]
    if name not in cols:
        raise RenderError(f"column {name!r} not found in {file} "
                          f"(has: {', '.join(sorted(cols))})")
    return cols[name]


def render(artifact_dir: str, figure: str, out_path: str | None = None) -> str:
    """Render one named figure from an artifact directory; returns the
    output path."""
    if figure not in RECIPES:
        raise RenderError(f"unknown figure {figure!r}; choose from "
                          + ", ".join(sorted(RECIPES)))
    recipe = RECIPES[figure]
    verify_manifest(artifact_dir, recipe)
    tables = {name: read_columns(os.path.join(artifact_dir, name))
              for name in recipe.files}
    if out_path is None:
        out_path = os.path.join(artifact_dir, f"{figure}.png")

    n = len(recipe.panels)
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, n, figsize=(4.0 * n, 3.0))
        if n == 1:
            axes = [axes]
        for ax, panel in zip(axes, recipe.panels):
            solid = dashed = 0
            for s in panel.series:
                x = _column(tables, s.file, s.x)
                y = _column(tables, s.file, s.y)
                if panel.yscale == "log":
                    y = np.abs(y)
                if s.dashed:
                    color = _DASHED_COLORS[dashed % len(_DASHED_COLORS)]
                    dashed += 1
                    style = dict(linestyle="--", color=color)
                else:
                    color = _SOLID_COLORS[solid % len(_SOLID_COLORS)]
                    solid += 1
                    style = dict(linestyle="-", color=color)
                ax.plot(x, y, label=s.label, marker=s.marker,
                        markersize=4, linewidth=1.2, **style)
            ax.set_xscale(panel.xscale)
            ax.set_yscale(panel.yscale)
            ax.set_title(panel.title)
            ax.set_xlabel(panel.xlabel)
            ax.set_ylabel(panel.ylabel)
            ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(out_path, format="png",
                    metadata={"Software": None})
        plt.close(fig)
    return out_path
