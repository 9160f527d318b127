"""Final-energy heatmap over a two-axis sweep CSV.

Input columns: axis_value, axis2_value, final_energy_J (the output of
``mecsim sweep --axis ... --axis2 ...``). Cells are colored by the
optimized energy at each grid point.
"""

from __future__ import annotations

import argparse

import numpy as np

from .common import PlotSpec, load_rows, new_axes, save_figure

REQUIRED = {"axis_value": float, "axis2_value": float, "final_energy_J": float}


def build_grid(rows) -> tuple[list[float], list[float], np.ndarray]:
    xs = sorted({r["axis_value"] for r in rows})
    ys = sorted({r["axis2_value"] for r in rows})
    grid = np.full((len(ys), len(xs)), np.nan)
    for row in rows:
        grid[ys.index(row["axis2_value"]), xs.index(row["axis_value"])] = row["final_energy_J"]
    if np.any(np.isnan(grid)):
        raise ValueError("sweep rows do not form a complete axis x axis2 grid")
    return xs, ys, grid


def render(spec: PlotSpec) -> None:
    rows = load_rows(spec.input_path, REQUIRED)
    xs, ys, grid = build_grid(rows)

    fig, ax = new_axes(spec, "axis_value", "axis2_value")
    mesh = ax.pcolormesh(
        np.arange(len(xs) + 1), np.arange(len(ys) + 1), grid, cmap="viridis", shading="flat"
    )
    ax.set_xticks(np.arange(len(xs)) + 0.5, [f"{x:g}" for x in xs])
    ax.set_yticks(np.arange(len(ys)) + 0.5, [f"{y:g}" for y in ys])
    fig.colorbar(mesh, ax=ax, label="final energy [J]")
    save_figure(fig, spec.output_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--title")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    args = parser.parse_args(argv)
    render(
        PlotSpec(
            kind="sweep_heatmap",
            input_path=args.input,
            output_path=args.out,
            title=args.title,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
        )
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
