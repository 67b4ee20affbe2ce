"""Great-circle geometry and speed/acceleration derivation.

All preprocessing math runs in 64-bit floats; values are only narrowed
to 32-bit at the window boundary, downstream of this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyTripError
from .modes import ModeLabel

EARTH_RADIUS_M = 6_371_000.0

MPS_TO_KMH = 3.6


@dataclass(frozen=True)
class GeoCoordinate:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not (math.isfinite(self.latitude) and math.isfinite(self.longitude)):
            raise ValueError("coordinate components must be finite")
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude out of range: {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude out of range: {self.longitude}")


@dataclass(frozen=True)
class TimedPoint:
    coordinate: GeoCoordinate
    timestamp: float  # seconds since the Unix epoch

    def __post_init__(self):
        if not math.isfinite(self.timestamp):
            raise ValueError("timestamp must be finite")


@dataclass(frozen=True)
class SpeedSample:
    """Instantaneous speed between a pair of fixes.

    The timestamp is the later fix's, so consecutive samples support
    forward differencing for acceleration.
    """

    speed_kmh: float
    timestamp: float
    interval_s: float

    def __post_init__(self):
        if self.speed_kmh < 0:
            raise ValueError("speed must be non-negative")
        if self.interval_s <= 0:
            raise ValueError("interval must be positive")


@dataclass(frozen=True)
class ThresholdTable:
    """Per-mode plausible speed range in km/h, bounds inclusive."""

    bounds: dict[ModeLabel, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_THRESHOLDS.bounds)
    )

    def __post_init__(self):
        missing = [m for m in ModeLabel if m not in self.bounds]
        if missing:
            raise ValueError(f"threshold table missing modes: {missing}")
        for mode, (lo, hi) in self.bounds.items():
            if not 0 <= lo < hi:
                raise ValueError(f"invalid bounds for {mode.name}: ({lo}, {hi})")

    def range_for(self, mode: ModeLabel) -> tuple[float, float]:
        return self.bounds[mode]


DEFAULT_THRESHOLDS = ThresholdTable(
    bounds={
        ModeLabel.BIKE: (0.5, 50.0),
        ModeLabel.BUS: (1.0, 120.0),
        ModeLabel.CAR: (3.0, 180.0),
        ModeLabel.TRAIN: (3.0, 350.0),
        ModeLabel.WALK: (0.1, 15.0),
    }
)


def haversine_distance(a: GeoCoordinate, b: GeoCoordinate) -> float:
    """Great-circle distance in meters on a sphere of radius 6,371 km."""
    phi1 = math.radians(a.latitude)
    phi2 = math.radians(b.latitude)
    dphi = math.radians(b.latitude - a.latitude)
    dlam = math.radians(b.longitude - a.longitude)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    # rounding can push h a hair above 1 for antipodal pairs
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def derive_speeds(points: Sequence[TimedPoint]) -> tuple[list[SpeedSample], int]:
    """Per-pair speeds in km/h for a time-ordered point sequence.

    Pairs with a non-positive time delta are skipped (duplicate fixes are
    common in phone logs); the second return value counts them so callers
    can audit. Raises EmptyTripError for fewer than two points.
    """
    if len(points) < 2:
        raise EmptyTripError(f"need at least 2 points, got {len(points)}")
    samples: list[SpeedSample] = []
    dropped = 0
    for prev, cur in zip(points, points[1:]):
        dt = cur.timestamp - prev.timestamp
        if dt <= 0:
            dropped += 1
            continue
        dist = haversine_distance(prev.coordinate, cur.coordinate)
        samples.append(
            SpeedSample(speed_kmh=dist / dt * MPS_TO_KMH, timestamp=cur.timestamp, interval_s=dt)
        )
    return samples, dropped


def filter_speed_bounds(
    samples: Iterable[SpeedSample], mode: ModeLabel, table: ThresholdTable | None = None
) -> list[SpeedSample]:
    """Keep samples whose speed lies inside the mode's plausible range."""
    table = table if table is not None else DEFAULT_THRESHOLDS
    lo, hi = table.range_for(mode)
    return [s for s in samples if lo <= s.speed_kmh <= hi]


def acceleration_series(speeds_kmh: np.ndarray, intervals_s: np.ndarray) -> np.ndarray:
    """Forward-difference accelerations in m/s^2.

    Element i is (v[i+1] - v[i]) / dt[i+1] with speeds converted to m/s;
    fewer than two samples yields an empty array.
    """
    v = np.asarray(speeds_kmh, dtype=np.float64) / MPS_TO_KMH
    dt = np.asarray(intervals_s, dtype=np.float64)
    if v.shape != dt.shape:
        raise ValueError("speeds and intervals must have equal length")
    if v.size < 2:
        return np.zeros(0, dtype=np.float64)
    return np.diff(v) / dt[1:]


def compute_accelerations(samples: Sequence[SpeedSample]) -> np.ndarray:
    """Accelerations between consecutive speed samples, in m/s^2."""
    speeds = np.array([s.speed_kmh for s in samples], dtype=np.float64)
    intervals = np.array([s.interval_s for s in samples], dtype=np.float64)
    return acceleration_series(speeds, intervals)
