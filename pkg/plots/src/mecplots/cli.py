"""Dispatcher over the four figure scripts.

Usage: ``mecsim-plot <kind> --input data.csv --out figure.png`` with
kind one of trajectory, se-curve, convergence, sweep-heatmap.
"""

from __future__ import annotations

import argparse
import sys

from . import convergence, se_curve, sweep_heatmap, trajectory
from .common import EmptyDataError, PlotSpec, SchemaError

RENDERERS = {
    "trajectory": ("trajectory", trajectory.render),
    "se-curve": ("se_curve", se_curve.render),
    "convergence": ("convergence", convergence.render),
    "sweep-heatmap": ("sweep_heatmap", sweep_heatmap.render),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mecsim-plot", description=__doc__)
    parser.add_argument("kind", choices=sorted(RENDERERS))
    parser.add_argument("--input", required=True, help="simulator CSV to plot")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--title")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind, renderer = RENDERERS[args.kind]
    spec = PlotSpec(
        kind=kind,
        input_path=args.input,
        output_path=args.out,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
    )
    try:
        renderer(spec)
    except (SchemaError, EmptyDataError, ValueError) as exc:
        print(f"mecsim-plot: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mecsim-plot: i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
