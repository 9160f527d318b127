"""Figure regeneration tests driven by real simulator CLI outputs."""

import csv
import math
import subprocess
import sys

import pytest

from mecplots.cli import main as plot_main
from mecplots.common import EmptyDataError, PlotSpec, SchemaError
from mecplots.convergence import load_series, render as render_convergence
from mecplots.se_curve import render as render_se_curve
from mecplots.sweep_heatmap import build_grid, render as render_heatmap
from mecplots.trajectory import render as render_trajectory

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

SE_TABLE = "velocity_mps,se_bits_per_s_per_hz\n0,6.0\n50,4.5\n100,3.0\n150,2.0\n"


def run_sim(args):
    result = subprocess.run(
        [sys.executable, "-m", "mecsim.cli", *args], capture_output=True, text=True
    )
    assert result.returncode == 0, result.stderr
    return result


def write_trips_csv(path):
    """Two short circular trips in the trip-file column layout."""
    meters_per_deg = 6_371_000.0 * math.pi / 180.0
    lines = ["Trip,Timestamp(ms),Latitude[deg],Longitude[deg]"]
    for trip, (r, speed) in {"1": (200.0, 10.0), "2": (300.0, 14.0)}.items():
        t = 0
        theta = 0.0
        for _ in range(40):
            lat = 42.3 + (r * math.sin(theta)) / meters_per_deg
            lon = -83.7 + (r * math.cos(theta)) / (meters_per_deg * math.cos(math.radians(42.3)))
            lines.append(f"{trip},{t},{lat:.7f},{lon:.7f}")
            theta += speed / r
            t += 1000
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture(scope="session")
def sim_outputs(tmp_path_factory):
    """Default-scenario CLI outputs for all four figure kinds."""
    root = tmp_path_factory.mktemp("sim")
    table = root / "se_table.csv"
    table.write_text(SE_TABLE)

    trips = root / "trips.csv"
    write_trips_csv(trips)
    scenario = root / "scenario.yaml"
    scenario.write_text(
        "\n".join(
            [
                "trajectory:",
                f"  trips: {trips}",
                "  base_station: {lat_deg: 42.3, lon_deg: -83.7, radius_m: 3000}",
                "  koopman: {series: velocity, embed_dim: 4}",
            ]
        )
        + "\n"
    )

    conv = root / "convergence.csv"
    run_sim(["convergence", "--out", str(conv)])

    sweep = root / "sweep.csv"
    run_sim(
        [
            "sweep", "--se-table", str(table),
            "--axis", "velocity", "--grid", "10,60,120",
            "--axis2", "bandwidth", "--grid2", "1e6,4e6",
            "--out", str(sweep),
        ]
    )

    samples = root / "samples.csv"
    report = root / "report.csv"
    run_sim(
        [
            "trajectory", "--config", str(scenario),
            "--out", str(report), "--samples-out", str(samples),
        ]
    )
    return {"convergence": conv, "sweep": sweep, "samples": samples, "se_table": table}


def assert_png(path):
    data = path.read_bytes()
    assert data.startswith(PNG_MAGIC)
    assert len(data) > 1000


class TestFigureRegeneration:
    def test_trajectory_figure(self, sim_outputs, tmp_path):
        out = tmp_path / "trajectory.png"
        render_trajectory(
            PlotSpec(kind="trajectory", input_path=str(sim_outputs["samples"]), output_path=str(out))
        )
        assert_png(out)

    def test_se_curve_figure(self, sim_outputs, tmp_path):
        out = tmp_path / "se_curve.png"
        render_se_curve(
            PlotSpec(kind="se_curve", input_path=str(sim_outputs["se_table"]), output_path=str(out))
        )
        assert_png(out)

    def test_convergence_figure_and_monotonicity(self, sim_outputs, tmp_path):
        out = tmp_path / "convergence.png"
        render_convergence(
            PlotSpec(
                kind="convergence", input_path=str(sim_outputs["convergence"]), output_path=str(out)
            )
        )
        assert_png(out)
        _, energies = load_series(sim_outputs["convergence"])
        assert all(b <= a for a, b in zip(energies, energies[1:]))

    def test_sweep_heatmap_figure(self, sim_outputs, tmp_path):
        out = tmp_path / "heatmap.png"
        render_heatmap(
            PlotSpec(kind="sweep_heatmap", input_path=str(sim_outputs["sweep"]), output_path=str(out))
        )
        assert_png(out)

    def test_heatmap_grid_shape(self, sim_outputs):
        with open(sim_outputs["sweep"]) as fh:
            rows = [
                {k: float(v) for k, v in row.items() if k in ("axis_value", "axis2_value", "final_energy_J")}
                for row in csv.DictReader(fh)
            ]
        xs, ys, grid = build_grid(rows)
        assert (len(ys), len(xs)) == grid.shape == (2, 3)

    def test_four_cell_heatmap(self, tmp_path):
        data = tmp_path / "grid.csv"
        data.write_text(
            "axis_value,axis2_value,final_energy_J\n"
            "1,10,4.0\n1,20,3.0\n2,10,2.0\n2,20,1.0\n"
        )
        out = tmp_path / "grid.png"
        assert plot_main(["sweep-heatmap", "--input", str(data), "--out", str(out)]) == 0
        assert_png(out)


class TestDeterminism:
    def test_png_bytes_stable(self, sim_outputs, tmp_path):
        spec = lambda out: PlotSpec(
            kind="convergence", input_path=str(sim_outputs["convergence"]), output_path=out
        )
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render_convergence(spec(str(a)))
        render_convergence(spec(str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_svg_bytes_stable(self, sim_outputs, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        for out in (a, b):
            render_se_curve(
                PlotSpec(kind="se_curve", input_path=str(sim_outputs["se_table"]), output_path=str(out))
            )
        assert a.read_bytes() == b.read_bytes()


class TestErrors:
    def test_header_only_is_empty_data_error(self, tmp_path):
        data = tmp_path / "empty.csv"
        data.write_text("iteration,chosen_task,total_energy_J\n")
        out = tmp_path / "x.png"
        with pytest.raises(EmptyDataError):
            render_convergence(
                PlotSpec(kind="convergence", input_path=str(data), output_path=str(out))
            )
        assert not out.exists()

    def test_missing_column_named(self, tmp_path):
        data = tmp_path / "bad.csv"
        data.write_text("iteration,energy\n0,1.0\n")
        with pytest.raises(SchemaError, match="total_energy_J"):
            render_convergence(
                PlotSpec(kind="convergence", input_path=str(data), output_path=str(tmp_path / "x.png"))
            )

    def test_cli_reports_schema_error(self, tmp_path):
        data = tmp_path / "bad.csv"
        data.write_text("velocity_mps\n1\n")
        code = plot_main(["se-curve", "--input", str(data), "--out", str(tmp_path / "x.png")])
        assert code == 2

    def test_incomplete_grid_rejected(self, tmp_path):
        data = tmp_path / "grid.csv"
        data.write_text("axis_value,axis2_value,final_energy_J\n1,10,4.0\n2,20,1.0\n")
        code = plot_main(["sweep-heatmap", "--input", str(data), "--out", str(tmp_path / "x.png")])
        assert code == 2

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            PlotSpec(kind="pie", input_path="x.csv", output_path="x.png")
