"""Velocity-dependent spectral efficiency models.

The modulation stack that maps vehicle speed and carrier frequency to an
achievable spectral efficiency is treated as a black box: callers supply
a lookup table of (velocity, se) points and this module interpolates it.
Two illustrative built-in tables are shipped for the Zak-based and
SFFT-based receivers; their values are placeholders with the right shape
(both decreasing with speed, Zak above SFFT), not measured data. Real
experiments should load a digitized curve with ``load_se_table``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

MODES = ("zak", "sfft", "constant", "custom-table")

TABLE_HEADER = ("velocity_mps", "se_bits_per_s_per_hz")

DEFAULT_CARRIER_HZ = 5.9e9

# Placeholder curves: velocities in m/s, efficiencies in bit/s/Hz. Shared
# velocity grid keeps zak >= sfft pointwise under linear interpolation.
ZAK_TABLE = (
    (0.0, 6.2),
    (20.0, 5.9),
    (40.0, 5.4),
    (60.0, 4.8),
    (80.0, 4.1),
    (100.0, 3.5),
    (120.0, 3.0),
    (140.0, 2.6),
)
SFFT_TABLE = (
    (0.0, 5.8),
    (20.0, 5.3),
    (40.0, 4.6),
    (60.0, 3.8),
    (80.0, 3.0),
    (100.0, 2.3),
    (120.0, 1.7),
    (140.0, 1.2),
)


class TableFormatError(ValueError):
    """Raised when an se-table file violates the documented CSV format."""


@dataclass(frozen=True)
class SeModel:
    """Immutable velocity -> spectral efficiency mapping.

    ``table`` holds (velocity m/s, se bit/s/Hz) knots with strictly
    increasing velocities and nonnegative efficiencies. ``carrier_hz`` is
    descriptive metadata: a table is valid for one carrier, and a second
    carrier means a second model instance.
    """

    mode: str
    table: tuple[tuple[float, float], ...]
    carrier_hz: float = DEFAULT_CARRIER_HZ
    _velocities: np.ndarray = field(init=False, repr=False, compare=False)
    _se_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown se model mode {self.mode!r}, expected one of {MODES}")
        if not self.table:
            raise ValueError("se table must be nonempty")
        if self.carrier_hz <= 0:
            raise ValueError(f"carrier_hz must be > 0, got {self.carrier_hz}")
        velocities = np.asarray([v for v, _ in self.table], dtype=float)
        se_values = np.asarray([s for _, s in self.table], dtype=float)
        if np.any(np.diff(velocities) <= 0):
            raise ValueError("table velocities must be strictly increasing")
        if np.any(se_values < 0):
            raise ValueError("table se values must be >= 0")
        object.__setattr__(self, "_velocities", velocities)
        object.__setattr__(self, "_se_values", se_values)

    @classmethod
    def constant(cls, se: float, carrier_hz: float = DEFAULT_CARRIER_HZ) -> "SeModel":
        """Model returning the same efficiency at every velocity."""
        return cls(mode="constant", table=((0.0, float(se)),), carrier_hz=carrier_hz)

    @classmethod
    def from_table(
        cls,
        pairs,
        mode: str = "custom-table",
        carrier_hz: float = DEFAULT_CARRIER_HZ,
    ) -> "SeModel":
        table = tuple((float(v), float(s)) for v, s in pairs)
        return cls(mode=mode, table=table, carrier_hz=carrier_hz)


def builtin_model(name: str, carrier_hz: float = DEFAULT_CARRIER_HZ) -> SeModel:
    """Return one of the shipped illustrative models ("zak" or "sfft")."""
    if name == "zak":
        return SeModel(mode="zak", table=ZAK_TABLE, carrier_hz=carrier_hz)
    if name == "sfft":
        return SeModel(mode="sfft", table=SFFT_TABLE, carrier_hz=carrier_hz)
    raise ValueError(f"no builtin se model named {name!r}")


def calc_se(model: SeModel, velocity: float) -> float:
    """Spectral efficiency at the given speed, in bit/s/Hz.

    Piecewise-linear interpolation over the model's table; velocities
    outside the table range clamp to the nearest endpoint value.
    """
    if velocity < 0:
        raise ValueError(f"velocity must be >= 0, got {velocity}")
    return float(np.interp(velocity, model._velocities, model._se_values))


def load_se_table(path, carrier_hz: float = DEFAULT_CARRIER_HZ) -> SeModel:
    """Load a custom-table model from a two-column CSV.

    The file must be UTF-8 with the exact header
    ``velocity_mps,se_bits_per_s_per_hz``; rows are numeric, velocities
    strictly increasing, efficiencies nonnegative. Errors report the
    offending 1-based line number.
    """
    pairs: list[tuple[float, float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TABLE_HEADER:
            raise TableFormatError(
                f"{path}: line 1: expected header {','.join(TABLE_HEADER)!r}, got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise TableFormatError(f"{path}: line {lineno}: expected 2 columns, got {len(row)}")
            try:
                velocity, se = float(row[0]), float(row[1])
            except ValueError as exc:
                raise TableFormatError(f"{path}: line {lineno}: non-numeric value: {exc}") from exc
            if se < 0:
                raise TableFormatError(f"{path}: line {lineno}: se must be >= 0, got {se}")
            if pairs and velocity <= pairs[-1][0]:
                raise TableFormatError(
                    f"{path}: line {lineno}: velocity {velocity} not greater than previous {pairs[-1][0]}"
                )
            pairs.append((velocity, se))
    if not pairs:
        raise TableFormatError(f"{path}: table has no data rows")
    return SeModel(mode="custom-table", table=tuple(pairs), carrier_hz=carrier_hz)


def save_se_table(model: SeModel, path) -> None:
    """Write a model's table in the format ``load_se_table`` reads.

    Values are written with shortest round-trip precision so a save/load
    cycle reproduces the table exactly.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for velocity, se in model.table:
            writer.writerow([repr(velocity), repr(se)])
