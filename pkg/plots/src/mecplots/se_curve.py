"""Spectral-efficiency vs velocity figure from an se-table CSV.

Input columns: velocity_mps, se_bits_per_s_per_hz (the table format the
simulator's channel model loads and saves).
"""

from __future__ import annotations

import argparse

from .common import PlotSpec, load_rows, new_axes, save_figure

REQUIRED = {"velocity_mps": float, "se_bits_per_s_per_hz": float}


def render(spec: PlotSpec) -> None:
    rows = load_rows(spec.input_path, REQUIRED)
    velocities = [row["velocity_mps"] for row in rows]
    efficiencies = [row["se_bits_per_s_per_hz"] for row in rows]

    fig, ax = new_axes(spec, "velocity [m/s]", "spectral efficiency [bit/s/Hz]")
    ax.plot(velocities, efficiencies, marker="o", markersize=3, linewidth=1.2)
    ax.grid(True, alpha=0.3)
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
            kind="se_curve",
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
