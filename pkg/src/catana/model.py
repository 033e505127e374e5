"""Shared domain types: channels, videos, popularity series, face observations.

All types here are immutable after construction and safe to share between
concurrent pipeline stages. Collection-valued fields are stored as tuples.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np


class ContractError(ValueError):
    """A data or contract violation (maps to CLI exit code 2)."""


# Subscriber intervals [lower, upper) defining the seven popularity classes.
POPULARITY_CLASS_BOUNDS: tuple[tuple[int, int], ...] = (
    (0, 10**3),
    (10**3, 10**4),
    (10**4, 10**5),
    (10**5, 10**6),
    (10**6, 10**7),
    (10**7, 5 * 10**7),
    (5 * 10**7, 10**8),
)


@dataclass(frozen=True)
class PopularityClass:
    class_index: int
    lower: int
    upper: int


POPULARITY_CLASSES: tuple[PopularityClass, ...] = tuple(
    PopularityClass(i, lo, hi) for i, (lo, hi) in enumerate(POPULARITY_CLASS_BOUNDS)
)


def popularity_class(subscribers: int) -> int:
    """Return the popularity class index for a subscriber count.

    Boundaries are left-inclusive: class 1 starts exactly at 10**3.
    Counts at or above 10**8 have no defined class and are rejected.
    """
    if subscribers < 0:
        raise ContractError(f"subscriber count must be non-negative, got {subscribers}")
    if subscribers >= 10**8:
        raise ContractError(
            f"subscriber count {subscribers} is outside the defined class range [0, 1e8)"
        )
    for cls in POPULARITY_CLASSES:
        if cls.lower <= subscribers < cls.upper:
            return cls.class_index
    raise AssertionError("unreachable: classes partition [0, 1e8)")


@dataclass(frozen=True)
class ChannelRecord:
    channel_id: str
    title: str
    category: str
    mcn: str | None = None
    featured_channels: tuple[str, ...] = ()
    video_count: int = 0

    def __post_init__(self) -> None:
        if self.channel_id in self.featured_channels:
            raise ContractError(f"channel {self.channel_id} features itself")
        if self.video_count < 0:
            raise ContractError("video_count must be non-negative")


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    channel_id: str
    upload_date: dt.date
    category: str
    frame_count: int
    frame_rate: float

    def __post_init__(self) -> None:
        if self.frame_count < 1:
            raise ContractError(f"video {self.video_id}: frame_count must be >= 1")
        if self.frame_rate <= 0:
            raise ContractError(f"video {self.video_id}: frame_rate must be > 0")


@dataclass(frozen=True)
class Sample:
    """One daily snapshot: cumulative views, and subscribers for channels."""

    date: dt.date
    views: int
    subscribers: int | None = None


@dataclass(frozen=True)
class PopularitySeries:
    subject_id: str
    samples: tuple[Sample, ...] = ()

    def views(self) -> list[int]:
        return [s.views for s in self.samples]

    def dates(self) -> list[dt.date]:
        return [s.date for s in self.samples]


def validate_series(series: PopularitySeries) -> list[str]:
    """Check the PopularitySeries invariants, returning one message per violation.

    Validation never raises; an empty list means the series is well formed.
    """
    violations: list[str] = []
    prev: Sample | None = None
    for sample in series.samples:
        if sample.views < 0:
            violations.append(f"{sample.date}: negative views")
        if sample.subscribers is not None and sample.subscribers < 0:
            violations.append(f"{sample.date}: negative subscribers")
        if prev is not None:
            if sample.date == prev.date:
                violations.append(f"{sample.date}: duplicate-date")
            elif sample.date < prev.date:
                violations.append(f"{sample.date}: dates not increasing")
            if sample.views < prev.views:
                violations.append(f"{sample.date}: non-monotone views")
        prev = sample
    return violations


@dataclass(frozen=True, eq=False)
class FaceObservation:
    """One face embedding tied to a (video, frame) position."""

    video_id: str
    frame_index: int
    embedding: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.frame_index < 0:
            raise ContractError("frame_index must be non-negative")
