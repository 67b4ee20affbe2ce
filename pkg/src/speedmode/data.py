"""Trip containers, window segmentation, and leak-free dataset splits."""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import geo
from .errors import EmptyTripError
from .modes import ModeLabel
from .seeding import STREAM_SPLIT, child_rng

DEFAULT_WINDOW = 200
DEFAULT_STRIDE = 50
DEFAULT_MIN_TAIL = 10


@dataclass
class RawTrip:
    """A labeled, time-ordered coordinate sequence as parsed from source data."""

    trip_id: str
    raw_mode: str
    points: list[geo.TimedPoint]

    def __post_init__(self):
        if not self.trip_id:
            raise ValueError("trip_id must be non-empty")
        ts = [p.timestamp for p in self.points]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"trip {self.trip_id}: points not time-ordered")


@dataclass
class SpeedTrip:
    """A trip reduced to its speed series; the model-facing trip unit."""

    trip_id: str
    mode: ModeLabel
    speeds_kmh: np.ndarray
    intervals_s: np.ndarray

    def __post_init__(self):
        self.speeds_kmh = np.asarray(self.speeds_kmh, dtype=np.float64)
        self.intervals_s = np.asarray(self.intervals_s, dtype=np.float64)
        if self.speeds_kmh.shape != self.intervals_s.shape:
            raise ValueError("speeds and intervals must align")


@dataclass
class SpeedWindow:
    """Fixed-length speed window with a validity mask (valid prefix)."""

    speeds: np.ndarray  # (T,) float32, zero where mask is False
    mask: np.ndarray  # (T,) bool
    label: ModeLabel
    trip_id: str
    valid_count: int

    def __post_init__(self):
        self.speeds = np.asarray(self.speeds, dtype=np.float32)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.speeds.shape != self.mask.shape or self.speeds.ndim != 1:
            raise ValueError("speeds/mask must be 1-D and aligned")
        if not 1 <= self.valid_count <= self.speeds.size:
            raise ValueError(f"valid_count out of range: {self.valid_count}")
        if int(self.mask.sum()) != self.valid_count:
            raise ValueError("valid_count disagrees with mask")
        if self.mask[: self.valid_count].sum() != self.valid_count:
            raise ValueError("valid entries must form a prefix")
        if np.any(self.speeds[~self.mask] != 0.0):
            raise ValueError("padded positions must be zero")


class WindowSet:
    """Columnar batch of SpeedWindows (what training and inference consume)."""

    def __init__(
        self,
        speeds: np.ndarray,
        mask: np.ndarray,
        labels: np.ndarray,
        valid_counts: np.ndarray,
        trip_ids: Sequence[str],
    ):
        self.speeds = np.asarray(speeds, dtype=np.float32)
        self.mask = np.asarray(mask, dtype=bool)
        self.labels = np.asarray(labels, dtype=np.int64)
        self.valid_counts = np.asarray(valid_counts, dtype=np.int64)
        self.trip_ids = list(trip_ids)
        n = self.speeds.shape[0]
        if not (
            self.mask.shape == self.speeds.shape
            and self.labels.shape == (n,)
            and self.valid_counts.shape == (n,)
            and len(self.trip_ids) == n
        ):
            raise ValueError("inconsistent column shapes")

    @property
    def window_length(self) -> int:
        return self.speeds.shape[1]

    def __len__(self) -> int:
        return self.speeds.shape[0]

    @classmethod
    def from_windows(cls, windows: Sequence[SpeedWindow]) -> "WindowSet":
        if not windows:
            raise ValueError("cannot build a WindowSet from zero windows")
        return cls(
            speeds=np.stack([w.speeds for w in windows]),
            mask=np.stack([w.mask for w in windows]),
            labels=np.array([int(w.label) for w in windows]),
            valid_counts=np.array([w.valid_count for w in windows]),
            trip_ids=[w.trip_id for w in windows],
        )

    def subset(self, idx) -> "WindowSet":
        idx = np.asarray(idx)
        return WindowSet(
            self.speeds[idx],
            self.mask[idx],
            self.labels[idx],
            self.valid_counts[idx],
            [self.trip_ids[i] for i in idx],
        )

    @staticmethod
    def concat(parts: Sequence["WindowSet"]) -> "WindowSet":
        return WindowSet(
            np.concatenate([p.speeds for p in parts]),
            np.concatenate([p.mask for p in parts]),
            np.concatenate([p.labels for p in parts]),
            np.concatenate([p.valid_counts for p in parts]),
            [t for p in parts for t in p.trip_ids],
        )

    def unique_trips(self) -> list[str]:
        return sorted(set(self.trip_ids))

    def indices_by_trip(self) -> dict[str, list[int]]:
        by_trip: dict[str, list[int]] = collections.defaultdict(list)
        for i, t in enumerate(self.trip_ids):
            by_trip[t].append(i)
        return dict(by_trip)


def quality_filter(trip: RawTrip) -> bool:
    """Keep a trip only if it has at least three GPS points."""
    return len(trip.points) >= 3


def window_spans(n: int, window: int, stride: int, min_tail: int) -> list[tuple[int, int]]:
    """(start, valid_length) spans for a series of length n.

    Full windows sit at starts 0, stride, 2*stride ... while they fit;
    whatever the last full window leaves uncovered becomes one padded
    tail window if it holds at least min_tail samples. A series shorter
    than the window always yields exactly one padded span.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if not 1 <= stride <= window:
        raise ValueError("stride must be in [1, window]")
    if n == 0:
        return []
    if n < window:
        return [(0, n)]
    spans = []
    start = 0
    while start + window <= n:
        spans.append((start, window))
        start += stride
    covered_end = spans[-1][0] + window
    tail = n - covered_end
    if tail >= min_tail:
        spans.append((covered_end, tail))
    return spans


def segment_windows(
    speeds_kmh: np.ndarray,
    label: ModeLabel,
    trip_id: str,
    window: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
    min_tail: int = DEFAULT_MIN_TAIL,
) -> list[SpeedWindow]:
    """Cut one trip's speed series into fixed-length, zero-padded windows."""
    series = np.asarray(speeds_kmh, dtype=np.float64)
    out = []
    for start, valid in window_spans(series.size, window, stride, min_tail):
        speeds = np.zeros(window, dtype=np.float32)
        speeds[:valid] = series[start : start + valid].astype(np.float32)
        mask = np.zeros(window, dtype=bool)
        mask[:valid] = True
        out.append(
            SpeedWindow(speeds=speeds, mask=mask, label=label, trip_id=trip_id, valid_count=valid)
        )
    return out


def windows_from_trips(
    trips: Sequence[SpeedTrip],
    window: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
    min_tail: int = DEFAULT_MIN_TAIL,
) -> list[SpeedWindow]:
    """Segment every trip, ordered by trip_id then window start."""
    out: list[SpeedWindow] = []
    for trip in sorted(trips, key=lambda t: t.trip_id):
        out.extend(segment_windows(trip.speeds_kmh, trip.mode, trip.trip_id, window, stride, min_tail))
    return out


def _allocate(n: int, ratios: Sequence[float]) -> list[int]:
    # largest-remainder allocation; deterministic tie-break by position
    exact = [n * r for r in ratios]
    counts = [int(x) for x in exact]
    order = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in range(n - sum(counts)):
        counts[order[i % len(order)]] += 1
    return counts


@dataclass
class DatasetSplit:
    train: WindowSet
    val: WindowSet
    test: WindowSet
    trip_ids: dict[str, list[str]] = field(default_factory=dict)


def _partition_trips(trip_ids: list[str], counts: Sequence[int], seed: int) -> list[list[str]]:
    rng = child_rng(seed, STREAM_SPLIT)
    order = rng.permutation(len(trip_ids))
    shuffled = [trip_ids[i] for i in order]
    parts, at = [], 0
    for c in counts:
        parts.append(shuffled[at : at + c])
        at += c
    return parts


def split_by_trip(
    windows: WindowSet,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 42,
) -> DatasetSplit:
    """Trip-granular train/val/test split; no trip straddles partitions."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("need three positive ratios")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must sum to 1")
    trips = windows.unique_trips()
    counts = _allocate(len(trips), ratios)
    if any(c == 0 for c in counts):
        raise ValueError(f"{len(trips)} trips cannot fill partitions with ratios {ratios}")
    parts = _partition_trips(trips, counts, seed)
    by_trip = windows.indices_by_trip()
    subsets = []
    for part in parts:
        idx = [i for t in sorted(part) for i in by_trip[t]]
        subsets.append(windows.subset(idx))
    return DatasetSplit(
        train=subsets[0],
        val=subsets[1],
        test=subsets[2],
        trip_ids={"train": sorted(parts[0]), "val": sorted(parts[1]), "test": sorted(parts[2])},
    )


def split_train_val(
    windows: WindowSet, val_fraction: float = 0.1, seed: int = 42
) -> tuple[WindowSet, WindowSet]:
    """Two-way trip-granular split, used to carve a validation slice."""
    if not 0 < val_fraction < 1:
        raise ValueError("val_fraction must be in (0, 1)")
    trips = windows.unique_trips()
    n_val = max(1, round(len(trips) * val_fraction))
    if n_val >= len(trips):
        raise ValueError("too few trips to carve a validation slice")
    parts = _partition_trips(trips, [len(trips) - n_val, n_val], seed)
    by_trip = windows.indices_by_trip()
    train_idx = [i for t in sorted(parts[0]) for i in by_trip[t]]
    val_idx = [i for t in sorted(parts[1]) for i in by_trip[t]]
    return windows.subset(train_idx), windows.subset(val_idx)


def kfold_by_trip(windows: WindowSet, k: int, seed: int = 42) -> list[WindowSet]:
    """k trip-disjoint folds with sizes differing by at most one trip."""
    if k < 2:
        raise ValueError("k must be >= 2")
    trips = windows.unique_trips()
    if k > len(trips):
        raise ValueError(f"k={k} exceeds trip count {len(trips)}")
    base, extra = divmod(len(trips), k)
    counts = [base + (1 if i < extra else 0) for i in range(k)]
    parts = _partition_trips(trips, counts, seed)
    by_trip = windows.indices_by_trip()
    return [windows.subset([i for t in sorted(p) for i in by_trip[t]]) for p in parts]


# fixed histogram edges in seconds, chosen around common GPS logging rates
PROFILE_BIN_EDGES = (0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 30.0, 60.0, 120.0, 300.0, float("inf"))


@dataclass
class IntervalProfile:
    count: int
    median: float | None
    p5: float | None
    p95: float | None
    histogram: list[int]

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "median": self.median,
            "p5": self.p5,
            "p95": self.p95,
            "bin_edges_s": list(PROFILE_BIN_EDGES),
            "histogram": self.histogram,
        }


def sampling_profile(timestamps: Sequence[float]) -> IntervalProfile:
    """Summarize the gaps between consecutive fixes of one or more trips."""
    ts = np.asarray(timestamps, dtype=np.float64)
    if ts.size < 2:
        return IntervalProfile(0, None, None, None, [0] * (len(PROFILE_BIN_EDGES) - 1))
    dt = np.diff(ts)
    p5, median, p95 = np.percentile(dt, [5, 50, 95])
    hist, _ = np.histogram(dt, bins=np.array(PROFILE_BIN_EDGES))
    return IntervalProfile(
        count=int(dt.size),
        median=float(median),
        p5=float(p5),
        p95=float(p95),
        histogram=[int(h) for h in hist],
    )


@dataclass
class PreprocessAudit:
    """Counts of everything removed between raw trips and speed trips."""

    label_drops: collections.Counter = field(default_factory=collections.Counter)
    qc_drops: int = 0
    zero_dt_pairs: int = 0
    threshold_drops: int = 0
    empty_after_filter: int = 0
    trips_kept: int = 0

    def to_dict(self) -> dict:
        return {
            "label_drops": dict(sorted(self.label_drops.items())),
            "qc_drops": self.qc_drops,
            "zero_dt_pairs": self.zero_dt_pairs,
            "threshold_drops": self.threshold_drops,
            "empty_after_filter": self.empty_after_filter,
            "trips_kept": self.trips_kept,
        }


def preprocess_trips(
    raw_trips: Iterable[RawTrip],
    thresholds: geo.ThresholdTable | None = None,
) -> tuple[list[SpeedTrip], PreprocessAudit]:
    """Raw trips -> speed trips: harmonize, QC, derive speeds, bound-filter.

    Sample-level threshold violations remove samples, not trips; a trip is
    only dropped when nothing usable remains.
    """
    thresholds = thresholds if thresholds is not None else geo.DEFAULT_THRESHOLDS
    audit = PreprocessAudit()
    out: list[SpeedTrip] = []
    for trip in raw_trips:
        mode = None
        from .modes import harmonize_label

        mode = harmonize_label(trip.raw_mode)
        if mode is None:
            audit.label_drops[trip.raw_mode.lower()] += 1
            continue
        if not quality_filter(trip):
            audit.qc_drops += 1
            continue
        try:
            samples, dropped = derive = geo.derive_speeds(trip.points)
        except EmptyTripError:
            audit.qc_drops += 1
            continue
        samples, dropped = derive
        audit.zero_dt_pairs += dropped
        kept = geo.filter_speed_bounds(samples, mode, thresholds)
        audit.threshold_drops += len(samples) - len(kept)
        if not kept:
            audit.empty_after_filter += 1
            continue
        out.append(
            SpeedTrip(
                trip_id=trip.trip_id,
                mode=mode,
                speeds_kmh=np.array([s.speed_kmh for s in kept]),
                intervals_s=np.array([s.interval_s for s in kept]),
            )
        )
        audit.trips_kept += 1
    return out, audit
