"""Shared plumbing for the figure scripts: spec type, CSV loading, saving.

Every figure kind reads documented simulator output columns and performs
no numerics beyond axis scaling; anything scientific happens upstream.
Rendering is deterministic: fixed style, no timestamps in the output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KINDS = ("trajectory", "se_curve", "convergence", "sweep_heatmap")

FIGSIZE = (7.0, 4.5)
DPI = 120


class SchemaError(ValueError):
    """Input CSV lacks a column the figure kind requires."""


class EmptyDataError(ValueError):
    """Input CSV has a header but no data rows."""


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    input_path: str
    output_path: str
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}, expected one of {KINDS}")


def load_rows(path, required: dict[str, type]) -> list[dict]:
    """Read a CSV, coercing required columns; fail on schema/empty input."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [name for name in required if name not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s): {', '.join(missing)}")
        rows = []
        for raw in reader:
            rows.append({name: kind(raw[name]) for name, kind in required.items()})
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")
    return rows


def new_axes(spec: PlotSpec, default_xlabel: str, default_ylabel: str):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.set_xlabel(spec.xlabel or default_xlabel)
    ax.set_ylabel(spec.ylabel or default_ylabel)
    if spec.title:
        ax.set_title(spec.title)
    return fig, ax


def save_figure(fig, output_path) -> None:
    """Write the image without embedded dates so reruns are byte-identical."""
    path = Path(output_path)
    kwargs = {"dpi": DPI, "bbox_inches": "tight"}
    if path.suffix.lower() == ".svg":
        plt.rcParams["svg.hashsalt"] = "mecplots"
        kwargs["metadata"] = {"Date": None}
    fig.savefig(path, **kwargs)
    plt.close(fig)
