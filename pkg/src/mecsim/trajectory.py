"""GPS trajectory ingestion, velocity estimation, and linear forecasting.

Input files follow the vehicle-energy-dataset CSV layout (one row per
GPS fix, grouped by a trip column). Velocities come from consecutive-fix
haversine distances; fix pairs whose spacing falls outside the expected
sampling interval are treated as gaps, splitting the statistics rather
than interpolating across dropouts.

Forecasting uses dynamic mode decomposition on a delay-embedded scalar
series: stack ``embed_dim`` consecutive values into state vectors, then
solve for the linear operator that advances one state to the next by
least squares. For any noise-free series generated by a linear
recurrence of order at most ``embed_dim`` this recovers the dynamics
exactly, which is the oracle the tests lean on.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

EARTH_RADIUS_M = 6_371_000.0

# Column names used by the public vehicle energy dataset.
DEFAULT_COLUMNS = {
    "trip": "Trip",
    "timestamp_ms": "Timestamp(ms)",
    "lat": "Latitude[deg]",
    "lon": "Longitude[deg]",
}

DEFAULT_MIN_GAP_MS = 1000
DEFAULT_MAX_GAP_MS = 4000


class SchemaError(ValueError):
    """Raised when an input file lacks a required column."""


class TripParseError(ValueError):
    """Raised when too many rows of a trip file fail to parse."""


class InsufficientDataError(ValueError):
    """Raised when a series is too short for the requested operation."""


@dataclass(frozen=True)
class TrajectorySample:
    timestamp_ms: int
    lat_deg: float
    lon_deg: float

    def __post_init__(self) -> None:
        if self.timestamp_ms < 0:
            raise ValueError(f"timestamp_ms must be >= 0, got {self.timestamp_ms}")
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"lat_deg out of range: {self.lat_deg}")
        if not -180.0 <= self.lon_deg <= 180.0:
            raise ValueError(f"lon_deg out of range: {self.lon_deg}")


@dataclass(frozen=True)
class Trip:
    trip_id: str
    samples: tuple[TrajectorySample, ...]


@dataclass(frozen=True)
class BaseStationGeom:
    """Base station location and nominal cell radius in meters."""

    lat_deg: float
    lon_deg: float
    radius_m: float

    def __post_init__(self) -> None:
        if not 100.0 <= self.radius_m <= 100_000.0:
            raise ValueError(f"radius_m must be within [100, 100000] m, got {self.radius_m}")


@dataclass(frozen=True)
class VelocityEstimate:
    """Velocities from valid consecutive-fix pairs plus the excluded gaps.

    ``points`` holds (timestamp_ms of the later fix, speed m/s); ``gaps``
    holds (t0, t1) timestamp pairs whose spacing fell outside bounds.
    """

    points: tuple[tuple[int, float], ...]
    gaps: tuple[tuple[int, int], ...]

    @property
    def speeds(self) -> list[float]:
        return [v for _, v in self.points]


def haversine_m(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in meters between two (lat, lon) points."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def parse_ved_csv(path, column_map=None, max_skip_fraction: float = 0.1) -> list[Trip]:
    """Parse a trip CSV into per-trip, time-sorted sample lists.

    Rows are grouped by the trip column, sorted by timestamp, and
    duplicate timestamps within a trip are dropped keeping the first
    occurrence. Individually broken rows are skipped with a counted
    warning; the file is rejected only when more than
    ``max_skip_fraction`` of its data rows fail.
    """
    columns = dict(DEFAULT_COLUMNS)
    if column_map:
        columns.update(column_map)

    groups: dict[str, list[TrajectorySample]] = {}
    skipped = 0
    total = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [name for name in columns.values() if name not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s): {', '.join(missing)}")
        for row in reader:
            total += 1
            try:
                sample = TrajectorySample(
                    timestamp_ms=int(float(row[columns["timestamp_ms"]])),
                    lat_deg=float(row[columns["lat"]]),
                    lon_deg=float(row[columns["lon"]]),
                )
                trip_id = str(row[columns["trip"]]).strip()
                if not trip_id:
                    raise ValueError("empty trip id")
            except (TypeError, ValueError):
                skipped += 1
                continue
            groups.setdefault(trip_id, []).append(sample)

    if total and skipped > max_skip_fraction * total:
        raise TripParseError(f"{path}: {skipped} of {total} rows failed to parse")
    if skipped:
        logger.warning("%s: skipped %d of %d malformed rows", path, skipped, total)

    trips = []
    for trip_id in sorted(groups):
        ordered = sorted(groups[trip_id], key=lambda s: s.timestamp_ms)
        deduped = [ordered[0]]
        for sample in ordered[1:]:
            if sample.timestamp_ms == deduped[-1].timestamp_ms:
                continue
            deduped.append(sample)
        trips.append(Trip(trip_id=trip_id, samples=tuple(deduped)))
    return trips


def estimate_velocity(
    samples,
    min_gap_ms: int = DEFAULT_MIN_GAP_MS,
    max_gap_ms: int = DEFAULT_MAX_GAP_MS,
) -> VelocityEstimate:
    """Per-pair speeds over a trip, excluding out-of-interval pairs.

    Consecutive fixes spaced outside [min_gap_ms, max_gap_ms] are flagged
    as gaps and contribute no velocity sample.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {len(samples)}")
    points: list[tuple[int, float]] = []
    gaps: list[tuple[int, int]] = []
    for prev, cur in zip(samples, samples[1:]):
        dt_ms = cur.timestamp_ms - prev.timestamp_ms
        if not min_gap_ms <= dt_ms <= max_gap_ms:
            gaps.append((prev.timestamp_ms, cur.timestamp_ms))
            continue
        dist = haversine_m((prev.lat_deg, prev.lon_deg), (cur.lat_deg, cur.lon_deg))
        points.append((cur.timestamp_ms, dist / (dt_ms / 1000.0)))
    return VelocityEstimate(points=tuple(points), gaps=tuple(gaps))


def angular_position(sample: TrajectorySample, bs: BaseStationGeom) -> tuple[float, float]:
    """Bearing and normalized range of a fix relative to a base station.

    Returns (phi, d_over_r): phi is the atan2 bearing of the sample in a
    local tangent plane centered at the station, measured from the east
    axis (due east -> 0, due north -> pi/2); d_over_r is the haversine
    distance divided by the cell radius, so callers can check that fixes
    stay deep inside the cell before reducing motion to the angle alone.

    The tangent plane uses equirectangular east/north offsets with the
    cos(latitude) meridian scaling, adequate at sub-kilometer ranges.
    """
    east = math.radians(sample.lon_deg - bs.lon_deg) * math.cos(math.radians(bs.lat_deg))
    north = math.radians(sample.lat_deg - bs.lat_deg)
    if east == 0.0 and north == 0.0:
        raise ValueError("bearing undefined: sample coincides with the base station")
    phi = math.atan2(north, east)
    d_over_r = haversine_m((sample.lat_deg, sample.lon_deg), (bs.lat_deg, bs.lon_deg)) / bs.radius_m
    return phi, d_over_r


@dataclass(frozen=True)
class KoopmanModel:
    """Linear operator fitted on delay-embedded snapshots of a scalar series.

    ``operator`` advances one embedding vector (oldest value first) to
    the next. ``mean`` is the offset removed before fitting when
    ``demean`` was enabled; predictions add it back.
    """

    embed_dim: int
    operator: np.ndarray
    mean: float
    demean: bool
    state_labels: tuple[str, ...]


def _embedding_labels(embed_dim: int) -> tuple[str, ...]:
    return tuple(f"x[t-{embed_dim - 1 - i}]" if i < embed_dim - 1 else "x[t]" for i in range(embed_dim))


def dmd_fit(series, embed_dim: int, demean: bool = False) -> KoopmanModel:
    """Fit the least-squares advance operator on a delay-embedded series.

    Builds snapshot matrices X (each column is ``embed_dim`` consecutive
    values) and X' (shifted by one step) and solves operator = X' X^+,
    with the pseudo-inverse truncating singular values below 1e-10 of
    the largest. A snapshot matrix with no signal above the rounding
    floor of the input (an all-zero series, or a constant series under
    mean removal) falls back to the identity operator, i.e. persistence.
    """
    values = np.asarray(list(series), dtype=float)
    if embed_dim < 1:
        raise ValueError(f"embed_dim must be >= 1, got {embed_dim}")
    if values.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if len(values) < embed_dim + 2:
        raise InsufficientDataError(
            f"need at least embed_dim + 2 = {embed_dim + 2} values, got {len(values)}"
        )
    mean = float(values.mean()) if demean else 0.0
    centered = values - mean
    windows = np.lib.stride_tricks.sliding_window_view(centered, embed_dim)
    snapshots = windows[:-1].T
    shifted = windows[1:].T
    # mean removal leaves O(eps * |mean|) residue on a constant series
    signal_floor = 64.0 * np.finfo(float).eps * float(np.max(np.abs(values), initial=0.0))
    if float(np.max(np.abs(snapshots))) <= signal_floor:
        operator = np.eye(embed_dim)
    else:
        operator = shifted @ np.linalg.pinv(snapshots, rcond=1e-10)
    if not np.all(np.isfinite(operator)):
        raise ValueError("fitted operator contains non-finite entries")
    return KoopmanModel(
        embed_dim=embed_dim,
        operator=operator,
        mean=mean,
        demean=demean,
        state_labels=_embedding_labels(embed_dim),
    )


def dmd_predict(model: KoopmanModel, recent, horizon: int) -> list[float]:
    """Forecast ``horizon`` values from the last ``embed_dim`` observations.

    Iterates the operator on the embedding of ``recent`` (oldest value
    first) and reports the newest coordinate of each iterate.
    """
    state = np.asarray(list(recent), dtype=float)
    if state.shape != (model.embed_dim,):
        raise ValueError(f"recent must hold exactly {model.embed_dim} values, got shape {state.shape}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    state = state - model.mean
    out = []
    for _ in range(horizon):
        state = model.operator @ state
        out.append(float(state[-1] + model.mean))
    return out


def prediction_rmse(predicted, actual) -> float:
    """Root-mean-square error between two equal-length sequences."""
    p = np.asarray(list(predicted), dtype=float)
    a = np.asarray(list(actual), dtype=float)
    if p.shape != a.shape or p.ndim != 1:
        raise ValueError(f"length mismatch: {p.shape} vs {a.shape}")
    if len(p) < 1:
        raise ValueError("need at least one element")
    return float(np.sqrt(np.mean((p - a) ** 2)))


@dataclass(frozen=True)
class ForecastReport:
    """Train/test errors of a fitted series forecaster."""

    n_train: int
    n_test: int
    train_rmse: float
    test_rmse: float


def evaluate_forecast(
    series,
    embed_dim: int,
    demean: bool = True,
    train_fraction: float = 0.8,
) -> ForecastReport:
    """Chronological train/test evaluation of the delay-embedded fit.

    Fits on the first ``train_fraction`` of the series. The train error
    is one-step-ahead over the training segment; the test error is a
    free-running forecast from the end of training across the held-out
    tail.
    """
    values = np.asarray(list(series), dtype=float)
    split = int(math.floor(len(values) * train_fraction))
    train, test = values[:split], values[split:]
    if len(train) < embed_dim + 2:
        raise InsufficientDataError(
            f"training split of {len(train)} values cannot support embed_dim {embed_dim}"
        )
    if len(test) < 1:
        raise InsufficientDataError("empty test split")
    model = dmd_fit(train, embed_dim, demean=demean)

    one_step = [
        dmd_predict(model, train[t - embed_dim : t], 1)[0] for t in range(embed_dim, len(train))
    ]
    train_rmse = prediction_rmse(one_step, train[embed_dim:])
    forecast = dmd_predict(model, train[-embed_dim:], len(test))
    test_rmse = prediction_rmse(forecast, test)
    return ForecastReport(
        n_train=len(train), n_test=len(test), train_rmse=train_rmse, test_rmse=test_rmse
    )
