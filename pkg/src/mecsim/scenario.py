"""Scenario configuration and experiment orchestration.

A scenario describes a synthetic request pool: how many devices, how
many tasks each, the sampling ranges of the physical parameters, where
spectral efficiency comes from, and the RNG seed. Everything downstream
(convergence traces, parameter sweeps, trajectory evaluation) is a pure
function of the configuration, so identical configs produce identical
output bytes.

Default parameter ranges are implementer choices picked to give a pool
dominated by offload-favorable tasks; they are not measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from . import trajectory
from .channel import SeModel, builtin_model, calc_se, load_se_table
from .energy import DeviceSpec, TaskSpec
from .optimizer import TaskPool, PoolDevice, greedy_optimize, init_plan
from .trajectory import (
    BaseStationGeom,
    InsufficientDataError,
    Trip,
    dmd_fit,
    dmd_predict,
    estimate_velocity,
    evaluate_forecast,
    haversine_m,
    parse_ved_csv,
)

SE_MODES = ("constant", "zak", "sfft", "table", "trajectory")
VELOCITY_MODES = ("instantaneous", "smoothed", "predicted")
SWEEP_AXES = ("velocity", "bandwidth", "datasize")
KOOPMAN_SERIES = ("angle", "velocity", "lat", "lon")

CONVERGENCE_COLUMNS = ("iteration", "chosen_task", "total_energy_J")
SWEEP_COLUMNS = ("axis_value", "init_energy_J", "final_energy_J", "saving_fraction")
SWEEP2_COLUMNS = ("axis_value", "axis2_value", "init_energy_J", "final_energy_J", "saving_fraction")
TRIP_CSV_COLUMNS = (
    "trip_id",
    "n_samples",
    "n_velocity_points",
    "n_gaps",
    "max_intersample_m",
    "velocity_mean_mps",
    "velocity_max_mps",
    "max_d_over_r",
    "koopman_train_rmse",
    "koopman_test_rmse",
)
SAMPLES_COLUMNS = ("trip_id", "timestamp_ms", "lat_deg", "lon_deg")


class ConfigError(ValueError):
    """Invalid scenario configuration; message names the offending field."""


def _as_float(name: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {value!r}") from None


@dataclass(frozen=True)
class ParamRange:
    """Closed positive interval sampled uniformly; lo == hi pins a value."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo > 0 and self.hi >= self.lo):
            raise ConfigError(f"range [{self.lo}, {self.hi}] must satisfy 0 < min <= max")

    @classmethod
    def parse(cls, name: str, value) -> "ParamRange":
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ConfigError(f"{name}: expected [min, max] or a single value")
            lo, hi = (_as_float(name, v) for v in value)
        else:
            lo = hi = _as_float(name, value)
        try:
            return cls(lo, hi)
        except ConfigError as exc:
            raise ConfigError(f"{name}: {exc}") from None

    def sample(self, u: float) -> float:
        return self.lo + (self.hi - self.lo) * u


@dataclass(frozen=True)
class SeSource:
    """Where each device's spectral efficiency comes from.

    constant        fixed value for every device
    zak / sfft      builtin illustrative table, evaluated at the scenario velocity
    table           custom CSV table, evaluated at the scenario velocity
    trajectory      per-device velocity estimated from a trip file, then a table
    """

    mode: str = "constant"
    value: float | None = 4.0
    path: str | None = None
    trips: str | None = None
    table: str = "zak"
    velocity_mode: str = "smoothed"

    def __post_init__(self) -> None:
        if self.mode not in SE_MODES:
            raise ConfigError(f"se_source.mode: {self.mode!r} not one of {SE_MODES}")
        if self.mode == "constant" and (self.value is None or self.value <= 0):
            raise ConfigError("se_source.value: constant mode needs a positive value")
        if self.mode == "table" and not self.path:
            raise ConfigError("se_source.path: table mode needs a CSV path")
        if self.mode == "trajectory":
            if not self.trips:
                raise ConfigError("se_source.trips: trajectory mode needs a trip file")
            if self.velocity_mode not in VELOCITY_MODES:
                raise ConfigError(
                    f"se_source.velocity_mode: {self.velocity_mode!r} not one of {VELOCITY_MODES}"
                )

    @classmethod
    def parse(cls, value) -> "SeSource":
        if value is None:
            return cls()
        if isinstance(value, (int, float)):
            return cls(mode="constant", value=float(value))
        if isinstance(value, str):
            if value in ("zak", "sfft"):
                return cls(mode=value)
            return cls(mode="table", path=value)
        if isinstance(value, dict):
            known = {"mode", "value", "path", "trips", "table", "velocity_mode"}
            unknown = set(value) - known
            if unknown:
                raise ConfigError(f"se_source: unknown key(s) {sorted(unknown)}")
            kwargs = dict(value)
            if "value" in kwargs and kwargs["value"] is not None:
                kwargs["value"] = _as_float("se_source.value", kwargs["value"])
            return cls(**kwargs)
        raise ConfigError(f"se_source: cannot interpret {value!r}")


@dataclass(frozen=True)
class KoopmanEvalConfig:
    series: str = "angle"
    embed_dim: int = 8
    demean: bool = True
    train_fraction: float = 0.8

    def __post_init__(self) -> None:
        if self.series not in KOOPMAN_SERIES:
            raise ConfigError(f"koopman.series: {self.series!r} not one of {KOOPMAN_SERIES}")
        if self.embed_dim < 1:
            raise ConfigError(f"koopman.embed_dim: must be >= 1, got {self.embed_dim}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"koopman.train_fraction: must be in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class TrajectoryEvalConfig:
    trips: str
    base_station: BaseStationGeom
    koopman: KoopmanEvalConfig = field(default_factory=KoopmanEvalConfig)
    min_gap_ms: int = trajectory.DEFAULT_MIN_GAP_MS
    max_gap_ms: int = trajectory.DEFAULT_MAX_GAP_MS


@dataclass(frozen=True)
class ScenarioConfig:
    n_users: int
    k_tasks: int
    rng_seed: int
    data_bits: ParamRange
    cycles_per_bit: ParamRange
    cpu_hz: ParamRange
    energy_coeff: ParamRange
    bandwidth_hz: ParamRange
    noise_var: ParamRange
    channel_gain: ParamRange
    se_source: SeSource
    velocity_mps: float = 15.0
    request_threshold: int | None = None
    trajectory_eval: TrajectoryEvalConfig | None = None

    def __post_init__(self) -> None:
        if self.n_users < 1:
            raise ConfigError(f"n_users: must be >= 1, got {self.n_users}")
        if self.k_tasks < 1:
            raise ConfigError(f"k_tasks: must be >= 1, got {self.k_tasks}")
        if self.channel_gain.hi > 1.0:
            raise ConfigError(f"channel_gain: gain cannot exceed 1, got max {self.channel_gain.hi}")
        if self.velocity_mps < 0:
            raise ConfigError(f"velocity_mps: must be >= 0, got {self.velocity_mps}")
        if self.request_threshold is not None and self.request_threshold < 1:
            raise ConfigError(f"request_threshold: must be >= 1, got {self.request_threshold}")

    @classmethod
    def default(cls) -> "ScenarioConfig":
        """The shipped default scenario (implementer values, fixed seed)."""
        return cls(
            n_users=10,
            k_tasks=20,
            rng_seed=42,
            data_bits=ParamRange(1e5, 1e7),
            cycles_per_bit=ParamRange(500.0, 2000.0),
            cpu_hz=ParamRange(0.5e9, 2e9),
            energy_coeff=ParamRange(1e-27, 1e-27),
            bandwidth_hz=ParamRange(1e6, 2e7),
            noise_var=ParamRange(1e-9, 1e-9),
            channel_gain=ParamRange(1.0, 1.0),
            se_source=SeSource(mode="constant", value=4.0),
        )


_RANGE_FIELDS = (
    "data_bits",
    "cycles_per_bit",
    "cpu_hz",
    "energy_coeff",
    "bandwidth_hz",
    "noise_var",
    "channel_gain",
)


def config_from_mapping(data: dict) -> ScenarioConfig:
    """Build a config from a parsed key-value document, defaulting gaps."""
    if not isinstance(data, dict):
        raise ConfigError(f"config document must be a mapping, got {type(data).__name__}")
    base = ScenarioConfig.default()
    known = {
        "n_users",
        "k_tasks",
        "rng_seed",
        "se_source",
        "velocity_mps",
        "request_threshold",
        "trajectory",
        *_RANGE_FIELDS,
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")

    kwargs = {}
    for name in ("n_users", "k_tasks", "rng_seed"):
        if name in data:
            try:
                kwargs[name] = int(data[name])
            except (TypeError, ValueError):
                raise ConfigError(f"{name}: expected an integer, got {data[name]!r}") from None
        else:
            kwargs[name] = getattr(base, name)
    for name in _RANGE_FIELDS:
        kwargs[name] = (
            ParamRange.parse(name, data[name]) if name in data else getattr(base, name)
        )
    kwargs["se_source"] = SeSource.parse(data.get("se_source")) if "se_source" in data else base.se_source
    if "velocity_mps" in data:
        kwargs["velocity_mps"] = _as_float("velocity_mps", data["velocity_mps"])
    if data.get("request_threshold") is not None:
        try:
            kwargs["request_threshold"] = int(data["request_threshold"])
        except (TypeError, ValueError):
            raise ConfigError(
                f"request_threshold: expected an integer, got {data['request_threshold']!r}"
            ) from None
    if "trajectory" in data and data["trajectory"] is not None:
        kwargs["trajectory_eval"] = _parse_trajectory_section(data["trajectory"])
    return ScenarioConfig(**kwargs)


def _parse_trajectory_section(section) -> TrajectoryEvalConfig:
    if not isinstance(section, dict):
        raise ConfigError("trajectory: expected a mapping")
    if "trips" not in section:
        raise ConfigError("trajectory.trips: required")
    bs_data = section.get("base_station")
    if not isinstance(bs_data, dict):
        raise ConfigError("trajectory.base_station: required mapping with lat_deg/lon_deg/radius_m")
    try:
        bs = BaseStationGeom(
            lat_deg=_as_float("trajectory.base_station.lat_deg", bs_data.get("lat_deg")),
            lon_deg=_as_float("trajectory.base_station.lon_deg", bs_data.get("lon_deg")),
            radius_m=_as_float("trajectory.base_station.radius_m", bs_data.get("radius_m")),
        )
    except ValueError as exc:
        raise ConfigError(f"trajectory.base_station: {exc}") from None
    koopman_data = section.get("koopman") or {}
    koopman = KoopmanEvalConfig(
        series=koopman_data.get("series", "angle"),
        embed_dim=int(koopman_data.get("embed_dim", 8)),
        demean=bool(koopman_data.get("demean", True)),
        train_fraction=float(koopman_data.get("train_fraction", 0.8)),
    )
    return TrajectoryEvalConfig(
        trips=str(section["trips"]),
        base_station=bs,
        koopman=koopman,
        min_gap_ms=int(section.get("min_gap_ms", trajectory.DEFAULT_MIN_GAP_MS)),
        max_gap_ms=int(section.get("max_gap_ms", trajectory.DEFAULT_MAX_GAP_MS)),
    )


def load_config(path) -> ScenarioConfig:
    """Load a YAML scenario file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    return config_from_mapping(data or {})


@dataclass(frozen=True)
class SampledDevice:
    """One device draw: physical parameters plus (data_bits, cycles) tasks."""

    device_id: str
    cpu_hz: float
    energy_coeff: float
    bandwidth_hz: float
    noise_var: float
    channel_gain: float
    tasks: tuple[tuple[float, float], ...]


def sample_instance(config: ScenarioConfig) -> list[SampledDevice]:
    """Draw the full scenario instance from the seeded generator.

    The draw order (per device: cpu, energy coefficient, bandwidth,
    noise, gain, then per task: bits, cycles) is part of the
    reproducibility contract; fixed-value ranges still consume one draw
    so pinning a parameter never shifts the rest of the stream.
    """
    rng = np.random.default_rng(config.rng_seed)
    devices = []
    for n in range(config.n_users):
        cpu = config.cpu_hz.sample(rng.random())
        coeff = config.energy_coeff.sample(rng.random())
        bandwidth = config.bandwidth_hz.sample(rng.random())
        noise = config.noise_var.sample(rng.random())
        gain = config.channel_gain.sample(rng.random())
        tasks = tuple(
            (config.data_bits.sample(rng.random()), config.cycles_per_bit.sample(rng.random()))
            for _ in range(config.k_tasks)
        )
        devices.append(
            SampledDevice(
                device_id=f"md{n:03d}",
                cpu_hz=cpu,
                energy_coeff=coeff,
                bandwidth_hz=bandwidth,
                noise_var=noise,
                channel_gain=gain,
                tasks=tasks,
            )
        )
    return devices


def resolve_se_model(source: SeSource, se_table_override=None) -> SeModel | None:
    """Materialize the table behind a source; None for constant mode."""
    if se_table_override is not None:
        return load_se_table(se_table_override)
    if source.mode == "constant":
        return None
    if source.mode in ("zak", "sfft"):
        return builtin_model(source.mode)
    if source.mode == "table":
        return load_se_table(source.path)
    # trajectory mode: the table may itself be builtin or a file
    if source.table in ("zak", "sfft"):
        return builtin_model(source.table)
    return load_se_table(source.table)


def _trajectory_velocities(config: ScenarioConfig) -> list[float]:
    """Per-device velocity from the trip file of a trajectory se source."""
    source = config.se_source
    trips = parse_ved_csv(source.trips)
    velocities = []
    for trip in trips:
        est = estimate_velocity(trip.samples)
        speeds = est.speeds
        if not speeds:
            raise ConfigError(
                f"se_source.trips: trip {trip.trip_id} has no valid velocity samples"
            )
        if source.velocity_mode == "instantaneous":
            velocities.append(speeds[-1])
        elif source.velocity_mode == "smoothed":
            velocities.append(float(np.mean(speeds)))
        else:  # predicted: one-step-ahead forecast of the next velocity
            embed = min(8, max(1, len(speeds) - 2))
            model = dmd_fit(speeds, embed, demean=True)
            velocities.append(max(0.0, dmd_predict(model, speeds[-embed:], 1)[0]))
    return [velocities[n % len(velocities)] for n in range(config.n_users)]


def build_pool(
    config: ScenarioConfig,
    instance: list[SampledDevice] | None = None,
    *,
    velocity: float | None = None,
    bandwidth_hz: float | None = None,
    data_bits: float | None = None,
    se_table_override=None,
) -> TaskPool:
    """Construct the request pool, optionally overriding one swept axis.

    Overrides replace the corresponding quantity uniformly (every device
    for bandwidth/velocity, every task for data size) without consuming
    any RNG draws, so sweeps reuse one sampled instance.
    """
    if instance is None:
        instance = sample_instance(config)
    source = config.se_source
    model = resolve_se_model(source, se_table_override)

    if model is None and velocity is None and source.mode == "constant":
        device_se = [source.value] * len(instance)
    elif source.mode == "trajectory" and velocity is None:
        device_se = [calc_se(model, v) for v in _trajectory_velocities(config)]
    else:
        v = config.velocity_mps if velocity is None else velocity
        se = calc_se(model, v) if model is not None else source.value
        device_se = [se] * len(instance)

    entries: dict[str, PoolDevice] = {}
    admitted = 0
    limit = config.request_threshold
    for sampled, se in zip(instance, device_se):
        tasks = []
        for bits, cycles in sampled.tasks:
            if limit is not None and admitted >= limit:
                break
            tasks.append(TaskSpec(data_bits=data_bits if data_bits is not None else bits, cycles_per_bit=cycles))
            admitted += 1
        if not tasks:
            break
        entries[sampled.device_id] = PoolDevice(
            device=DeviceSpec(
                cpu_hz=sampled.cpu_hz,
                energy_coeff=sampled.energy_coeff,
                bandwidth_hz=bandwidth_hz if bandwidth_hz is not None else sampled.bandwidth_hz,
                noise_var=sampled.noise_var,
                channel_gain=sampled.channel_gain,
            ),
            se=se,
            tasks=tuple(tasks),
        )
    return TaskPool(devices=entries)


def run_convergence(config: ScenarioConfig, se_table_override=None) -> list[dict]:
    """Greedy run on the configured pool, one row per accepted iteration.

    Row 0 is the initial all-0.5 plan; the last accepted step is the
    final state.
    """
    pool = build_pool(config, se_table_override=se_table_override)
    _, trace = greedy_optimize(pool)
    rows = [{"iteration": 0, "chosen_task": "init", "total_energy_J": trace.initial_energy_j}]
    for step in trace.steps:
        rows.append(
            {
                "iteration": step.iteration,
                "chosen_task": f"{step.task[0]}:{step.task[1]}",
                "total_energy_J": step.total_energy_j,
            }
        )
    return rows


def _sweep_overrides(axis: str, value: float) -> dict:
    if axis == "velocity":
        return {"velocity": value}
    if axis == "bandwidth":
        return {"bandwidth_hz": value}
    return {"data_bits": value}


def run_sweep(
    config: ScenarioConfig,
    axis: str,
    grid,
    axis2: str | None = None,
    grid2=None,
    se_table_override=None,
) -> list[dict]:
    """Optimize the same sampled instance at every grid point.

    With one axis each row is (axis_value, init_energy_J, final_energy_J,
    saving_fraction); adding a second axis crosses the grids and inserts
    axis2_value. Only the swept quantities change between rows: the task
    instance is sampled once from the seed.
    """
    for name, ax in (("axis", axis), ("axis2", axis2)):
        if ax is not None and ax not in SWEEP_AXES:
            raise ConfigError(f"{name}: {ax!r} not one of {SWEEP_AXES}")
    grid = [_as_float("grid", v) for v in grid]
    if not grid:
        raise ConfigError("grid: must be nonempty")
    if any(v <= 0 for v in grid):
        raise ConfigError("grid: values must be positive")
    if axis2 is not None:
        if axis2 == axis:
            raise ConfigError("axis2: must differ from axis")
        grid2 = [_as_float("grid2", v) for v in (grid2 or [])]
        if not grid2:
            raise ConfigError("grid2: must be nonempty when axis2 is set")
        if any(v <= 0 for v in grid2):
            raise ConfigError("grid2: values must be positive")
    elif grid2:
        raise ConfigError("grid2: requires axis2")

    if axis == "velocity" or axis2 == "velocity":
        if config.se_source.mode == "constant" and se_table_override is None:
            raise ConfigError(
                "axis: velocity sweep needs a table-backed se_source (or --se-table)"
            )

    instance = sample_instance(config)
    rows = []
    for value in grid:
        for value2 in grid2 if axis2 is not None else [None]:
            overrides = _sweep_overrides(axis, value)
            if axis2 is not None:
                overrides.update(_sweep_overrides(axis2, value2))
            pool = build_pool(
                config, instance, se_table_override=se_table_override, **overrides
            )
            initial = init_plan(pool).total_energy_j
            plan, _ = greedy_optimize(pool)
            row = {"axis_value": value}
            if axis2 is not None:
                row["axis2_value"] = value2
            row.update(
                {
                    "init_energy_J": initial,
                    "final_energy_J": plan.total_energy_j,
                    "saving_fraction": (initial - plan.total_energy_j) / initial,
                }
            )
            rows.append(row)
    return rows


def _trip_geometry(trip: Trip, cfg: TrajectoryEvalConfig) -> dict:
    est = estimate_velocity(trip.samples, cfg.min_gap_ms, cfg.max_gap_ms)
    distances = []
    for prev, cur in zip(trip.samples, trip.samples[1:]):
        dt = cur.timestamp_ms - prev.timestamp_ms
        if cfg.min_gap_ms <= dt <= cfg.max_gap_ms:
            distances.append(
                haversine_m((prev.lat_deg, prev.lon_deg), (cur.lat_deg, cur.lon_deg))
            )
    bs = cfg.base_station
    d_over_r = [
        haversine_m((s.lat_deg, s.lon_deg), (bs.lat_deg, bs.lon_deg)) / bs.radius_m
        for s in trip.samples
    ]
    speeds = est.speeds
    return {
        "trip_id": trip.trip_id,
        "n_samples": len(trip.samples),
        "n_velocity_points": len(est.points),
        "n_gaps": len(est.gaps),
        "max_intersample_m": max(distances) if distances else None,
        "velocity_mean_mps": float(np.mean(speeds)) if speeds else None,
        "velocity_min_mps": min(speeds) if speeds else None,
        "velocity_max_mps": max(speeds) if speeds else None,
        "max_d_over_r": max(d_over_r),
        "_speeds": speeds,
    }


def _trip_series(trip: Trip, record: dict, cfg: TrajectoryEvalConfig) -> list[float]:
    kind = cfg.koopman.series
    if kind == "velocity":
        return record["_speeds"]
    if kind == "lat":
        return [s.lat_deg for s in trip.samples]
    if kind == "lon":
        return [s.lon_deg for s in trip.samples]
    bs = cfg.base_station
    phi = [trajectory.angular_position(s, bs)[0] for s in trip.samples]
    return list(np.unwrap(phi))


def run_trajectory_eval(cfg: TrajectoryEvalConfig) -> dict:
    """Geometry, velocity, and forecast-quality report for every trip."""
    trips = parse_ved_csv(cfg.trips)
    records = []
    for trip in trips:
        record = _trip_geometry(trip, cfg)
        series = _trip_series(trip, record, cfg)
        try:
            report = evaluate_forecast(
                series, cfg.koopman.embed_dim, cfg.koopman.demean, cfg.koopman.train_fraction
            )
            record["koopman"] = {
                "series": cfg.koopman.series,
                "embed_dim": cfg.koopman.embed_dim,
                "demean": cfg.koopman.demean,
                "n_train": report.n_train,
                "n_test": report.n_test,
                "train_rmse": report.train_rmse,
                "test_rmse": report.test_rmse,
            }
        except InsufficientDataError as exc:
            record["koopman"] = {"series": cfg.koopman.series, "skipped": str(exc)}
        record.pop("_speeds")
        records.append(record)

    intersample = [r["max_intersample_m"] for r in records if r["max_intersample_m"] is not None]
    return {
        "trips_file": cfg.trips,
        "base_station": {
            "lat_deg": cfg.base_station.lat_deg,
            "lon_deg": cfg.base_station.lon_deg,
            "radius_m": cfg.base_station.radius_m,
        },
        "gap_bounds_ms": [cfg.min_gap_ms, cfg.max_gap_ms],
        "trips": records,
        "summary": {
            "n_trips": len(records),
            "max_intersample_m": max(intersample) if intersample else None,
            "max_d_over_r": max(r["max_d_over_r"] for r in records) if records else None,
        },
    }


def trajectory_report_rows(report: dict) -> list[dict]:
    """Flatten the trajectory report into per-trip CSV records."""
    rows = []
    for record in report["trips"]:
        koopman = record.get("koopman") or {}
        rows.append(
            {
                "trip_id": record["trip_id"],
                "n_samples": record["n_samples"],
                "n_velocity_points": record["n_velocity_points"],
                "n_gaps": record["n_gaps"],
                "max_intersample_m": record["max_intersample_m"],
                "velocity_mean_mps": record["velocity_mean_mps"],
                "velocity_max_mps": record["velocity_max_mps"],
                "max_d_over_r": record["max_d_over_r"],
                "koopman_train_rmse": koopman.get("train_rmse"),
                "koopman_test_rmse": koopman.get("test_rmse"),
            }
        )
    return rows


def trip_sample_rows(trips: list[Trip]) -> list[dict]:
    """Per-fix rows (trip_id, timestamp_ms, lat_deg, lon_deg) for plotting."""
    return [
        {
            "trip_id": trip.trip_id,
            "timestamp_ms": sample.timestamp_ms,
            "lat_deg": sample.lat_deg,
            "lon_deg": sample.lon_deg,
        }
        for trip in trips
        for sample in trip.samples
    ]
