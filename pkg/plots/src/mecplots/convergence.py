"""Greedy energy-trace staircase from a convergence CSV.

Input columns: iteration, total_energy_J. The energy axis switches to a
log scale when every value is positive, since traces often span decades.
"""

from __future__ import annotations

import argparse

from .common import PlotSpec, load_rows, new_axes, save_figure

REQUIRED = {"iteration": int, "total_energy_J": float}


def load_series(path) -> tuple[list[int], list[float]]:
    rows = load_rows(path, REQUIRED)
    return [r["iteration"] for r in rows], [r["total_energy_J"] for r in rows]


def render(spec: PlotSpec) -> None:
    iterations, energies = load_series(spec.input_path)

    fig, ax = new_axes(spec, "iteration", "total energy [J]")
    ax.step(iterations, energies, where="post", linewidth=1.4)
    if all(e > 0 for e in energies):
        ax.set_yscale("log")
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
            kind="convergence",
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
