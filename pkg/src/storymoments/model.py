"""Core domain model: moment vectors, tracks, sessions, and their algebra.

A moment is a 3-component measurement in [-1, 1]^3 along three fixed axes.
Discourse tracks (one per character) use (concern, endearment, justice);
the single story track uses (curiosity, surprise, clarity).  Axis index
order is canonical and maps to chart colors as index 0 -> red,
1 -> green, 2 -> blue.

All values here are immutable after construction; validation happens in
the constructors so no invalid instance can exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import (
    DuplicateSubject,
    EmptyInput,
    NonMonotoneTime,
    NonPositiveWeight,
    NotFinite,
    OutOfRange,
    SubjectKindMismatch,
    BadWeights,
)

STORY_SUBJECT = "story"


class TrackKind(str, Enum):
    DISCOURSE = "discourse"
    STORY = "story"


@dataclass(frozen=True)
class Axis:
    """One universal moment axis with its positive and negative pole names."""

    name: str
    positive_pole: str
    negative_pole: str


DISCOURSE_AXES: tuple[Axis, Axis, Axis] = (
    Axis("concern", "pity", "envy"),
    Axis("endearment", "love", "hate"),
    Axis("justice", "comeuppance", "getting-away"),
)

STORY_AXES: tuple[Axis, Axis, Axis] = (
    Axis("curiosity", "curiosity", "apathy"),
    Axis("surprise", "surprise", "predictable"),
    Axis("clarity", "clarity", "confusion"),
)


def axes_for(kind: TrackKind) -> tuple[Axis, Axis, Axis]:
    return DISCOURSE_AXES if kind is TrackKind.DISCOURSE else STORY_AXES


def axis_names(kind: TrackKind) -> list[str]:
    return [a.name for a in axes_for(kind)]


def _check_component(value: float, label: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NotFinite(f"{label} is not finite: {value!r}")
    if not -1.0 <= value <= 1.0:
        raise OutOfRange(f"{label} outside [-1, 1]: {value!r}")
    return value


@dataclass(frozen=True)
class MomentVector:
    """A point of [-1, 1]^3; the atom of the whole system."""

    m0: float
    m1: float
    m2: float

    def __post_init__(self):
        object.__setattr__(self, "m0", _check_component(self.m0, "m0"))
        object.__setattr__(self, "m1", _check_component(self.m1, "m1"))
        object.__setattr__(self, "m2", _check_component(self.m2, "m2"))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.m0, self.m1, self.m2)

    def __getitem__(self, i: int) -> float:
        return self.as_tuple()[i]


def make_moment(m0: float, m1: float, m2: float) -> MomentVector:
    """Validate three components into a MomentVector."""
    return MomentVector(m0, m1, m2)


def dot_similarity(a: MomentVector, b: MomentVector) -> float:
    """Plain dot product; ranges over [-3, 3] for cube-bounded vectors."""
    return a.m0 * b.m0 + a.m1 * b.m1 + a.m2 * b.m2


class RotationAxis(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"


def rotate_axes_90(m: MomentVector, axis: RotationAxis) -> MomentVector:
    """Rotate +90 degrees about one axis (right-hand rule).

    Converts one moment type into another; the cube is closed under
    these rotations.
    """
    axis = RotationAxis(axis)
    if axis is RotationAxis.X:
        return MomentVector(m.m0, -m.m2, m.m1)
    if axis is RotationAxis.Y:
        return MomentVector(m.m2, m.m1, -m.m0)
    return MomentVector(-m.m1, m.m0, m.m2)


@dataclass(frozen=True)
class MomentPoint:
    """Homogeneous moment: components pre-multiplied by a positive weight.

    The weight can be read as duration or importance; summing points and
    dividing by the total weight yields a weighted average that cannot
    leave the cube.
    """

    wm0: float
    wm1: float
    wm2: float
    weight: float


def to_point(m: MomentVector, weight: float) -> MomentPoint:
    weight = float(weight)
    if not math.isfinite(weight) or weight <= 0.0:
        raise NonPositiveWeight(f"weight must be positive, got {weight!r}")
    return MomentPoint(weight * m.m0, weight * m.m1, weight * m.m2, weight)


def point_average(points: Sequence[MomentPoint]) -> MomentVector:
    """Weighted average of moments; always lands back inside the cube."""
    if not points:
        raise EmptyInput("point_average requires at least one point")
    s0 = s1 = s2 = sw = 0.0
    for p in points:
        if p.weight <= 0.0:
            raise NonPositiveWeight(f"weight must be positive, got {p.weight!r}")
        s0 += p.wm0
        s1 += p.wm1
        s2 += p.wm2
        sw += p.weight
    # Division can overshoot +/-1 by an ulp; nudge back inside the cube.
    out = [s0 / sw, s1 / sw, s2 / sw]
    out = [min(1.0, max(-1.0, v)) for v in out]
    return MomentVector(*out)


@dataclass(frozen=True)
class Weights:
    """Barycentric weights for combining the three axis functions."""

    a0: float
    a1: float
    a2: float

    def __post_init__(self):
        vals = [float(self.a0), float(self.a1), float(self.a2)]
        for v in vals:
            if not math.isfinite(v):
                raise BadWeights(f"weight is not finite: {v!r}")
            if not 0.0 <= v <= 1.0:
                raise BadWeights(f"weight outside [0, 1]: {v!r}")
        total = sum(vals)
        if abs(total - 1.0) > 1e-9:
            raise BadWeights(f"weights must sum to 1, got {total!r}")
        # Renormalize exactly so downstream sums can rely on sum == 1.
        vals = [v / total for v in vals]
        object.__setattr__(self, "a0", vals[0])
        object.__setattr__(self, "a1", vals[1])
        object.__setattr__(self, "a2", vals[2])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a0, self.a1, self.a2)


EQUAL_WEIGHTS = Weights(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


@dataclass(frozen=True)
class TimedMoment:
    """A moment stamped with its film time in minutes."""

    t: float
    moment: MomentVector
    note: Optional[str] = None

    def __post_init__(self):
        t = float(self.t)
        if not math.isfinite(t):
            raise NotFinite(f"timestamp is not finite: {t!r}")
        if t < 0.0:
            raise OutOfRange(f"timestamp must be >= 0 minutes, got {t!r}")
        object.__setattr__(self, "t", t)


@dataclass(frozen=True)
class Track:
    """Strictly time-increasing sequence of moments for one subject."""

    subject: str
    kind: TrackKind
    moments: tuple[TimedMoment, ...] = ()

    def __post_init__(self):
        kind = TrackKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "moments", tuple(self.moments))
        if (self.subject == STORY_SUBJECT) != (kind is TrackKind.STORY):
            raise SubjectKindMismatch(
                f"kind {kind.value!r} requires subject "
                f"{STORY_SUBJECT!r} exactly; got {self.subject!r}"
            )
        for a, b in zip(self.moments, self.moments[1:]):
            if not a.t < b.t:
                raise NonMonotoneTime(
                    f"timestamps must strictly increase: {a.t!r} then {b.t!r}",
                    location={"subject": self.subject},
                )

    def __len__(self) -> int:
        return len(self.moments)

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(tm.t for tm in self.moments)

    def axes(self) -> tuple[Axis, Axis, Axis]:
        return axes_for(self.kind)

    def with_moment(self, tm: TimedMoment) -> "Track":
        return Track(self.subject, self.kind, self.moments + (tm,))


@dataclass(frozen=True)
class Session:
    """One film's tracks plus metadata; the persistence and API unit."""

    title: str
    tracks: tuple[Track, ...] = ()
    runtime_minutes: Optional[float] = None
    analyst: Optional[str] = None
    created: Optional[str] = None
    modified: Optional[str] = None
    schema_version: str = "1"

    def __post_init__(self):
        object.__setattr__(self, "tracks", tuple(self.tracks))
        seen: set[tuple[str, TrackKind]] = set()
        for tr in self.tracks:
            key = (tr.subject, tr.kind)
            if key in seen:
                raise DuplicateSubject(
                    f"duplicate track for subject {tr.subject!r} "
                    f"({tr.kind.value})"
                )
            seen.add(key)
            if self.runtime_minutes is not None:
                for tm in tr.moments:
                    if tm.t > self.runtime_minutes:
                        raise OutOfRange(
                            f"timestamp {tm.t!r} exceeds runtime "
                            f"{self.runtime_minutes!r} minutes",
                            location={"subject": tr.subject},
                        )

    def track(self, subject: str, kind: TrackKind | None = None) -> Track | None:
        for tr in self.tracks:
            if tr.subject == subject and (kind is None or tr.kind == kind):
                return tr
        return None
