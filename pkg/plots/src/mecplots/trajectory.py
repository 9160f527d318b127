"""Latitude/longitude track figure from a per-fix samples CSV.

Input columns: trip_id, lat_deg, lon_deg (as written by
``mecsim trajectory --samples-out``). One line per trip.
"""

from __future__ import annotations

import argparse

from .common import PlotSpec, load_rows, new_axes, save_figure

REQUIRED = {"trip_id": str, "lat_deg": float, "lon_deg": float}


def render(spec: PlotSpec) -> None:
    rows = load_rows(spec.input_path, REQUIRED)
    by_trip: dict[str, tuple[list[float], list[float]]] = {}
    for row in rows:
        lons, lats = by_trip.setdefault(row["trip_id"], ([], []))
        lons.append(row["lon_deg"])
        lats.append(row["lat_deg"])

    fig, ax = new_axes(spec, "longitude [deg]", "latitude [deg]")
    for trip_id, (lons, lats) in by_trip.items():
        ax.plot(lons, lats, linewidth=1.2, label=f"trip {trip_id}")
    ax.legend(loc="best", fontsize=8)
    ax.ticklabel_format(useOffset=False)
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
            kind="trajectory",
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
