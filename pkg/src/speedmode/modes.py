"""Transportation mode labels and raw-label harmonization."""

from __future__ import annotations

import enum
import re


class ModeLabel(enum.IntEnum):
    """The five target classes, ordinals fixed alphabetically."""

    BIKE = 0
    BUS = 1
    CAR = 2
    TRAIN = 3
    WALK = 4

    @property
    def display(self) -> str:
        return self.name.capitalize()


N_CLASSES = len(ModeLabel)

# Raw labels that are deliberately excluded rather than mapped.
KNOWN_DROP_LABELS = frozenset(
    {"airplane", "boat", "ferry", "motorcycle", "run", "aerialway"}
)

_HARMONIZATION = {
    "bike": ModeLabel.BIKE,
    "bicycle": ModeLabel.BIKE,
    "bus": ModeLabel.BUS,
    "car": ModeLabel.CAR,
    "taxi": ModeLabel.CAR,
    "train": ModeLabel.TRAIN,
    "subway": ModeLabel.TRAIN,
    "lightrail": ModeLabel.TRAIN,
    "regionaltrain": ModeLabel.TRAIN,
    "tram": ModeLabel.TRAIN,
    "walk": ModeLabel.WALK,
}


def _normalize(raw: str) -> str:
    # "LightRail", "light_rail" and "light rail" all collapse to "lightrail"
    return re.sub(r"[^a-z]", "", raw.lower())


def harmonize_label(raw: str) -> ModeLabel | None:
    """Map a raw dataset label onto the five-class scheme.

    Returns None for labels that are excluded (known exclusions and
    anything unrecognized alike); callers are expected to count drops
    rather than default silently.
    """
    return _HARMONIZATION.get(_normalize(raw))


def is_known_drop(raw: str) -> bool:
    return _normalize(raw) in KNOWN_DROP_LABELS
