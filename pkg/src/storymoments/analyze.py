"""Cross-track statistics and comparison.

Summaries work on the exact piecewise-linear accumulated functions (no
sampling): per-axis extremes, the share of film time with positive
combined attraction, and maximal rising/falling/flat intervals.

Comparison aligns tracks to a shared timeline (first moment at the
offset), accumulates, samples F-bar on a common grid, and scores pairs
with Pearson correlation over the overlapping window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .curves import (
    AccumulatedTrack,
    accumulate,
    align_tracks,
    eval_accumulated_combined,
    uniform_grid,
)
from .errors import EmptyTrack, NoOverlap
from .model import Track, TrackKind, Weights


@dataclass(frozen=True)
class TrendInterval:
    start: float
    end: float
    direction: str  # "rising" | "falling" | "flat"


@dataclass(frozen=True)
class TrackSummary:
    subject: str
    kind: TrackKind
    count: int
    final_accumulated: tuple[float, float, float]
    axis_min: tuple[float, float, float]
    axis_max: tuple[float, float, float]
    positive_fraction: float  # share of [t_1, t_N] with F-bar > 0
    intervals: tuple[TrendInterval, ...]

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "kind": self.kind.value,
            "count": self.count,
            "final_accumulated": list(self.final_accumulated),
            "axis_min": list(self.axis_min),
            "axis_max": list(self.axis_max),
            "positive_fraction": self.positive_fraction,
            "intervals": [
                {"start": iv.start, "end": iv.end, "direction": iv.direction}
                for iv in self.intervals
            ],
        }


def _fbar_knots(acc: AccumulatedTrack, w: Weights) -> list[tuple[float, float]]:
    return [
        (t, w.a0 * v[0] + w.a1 * v[1] + w.a2 * v[2]) for t, v in acc.entries
    ]


def _positive_fraction(knots: list[tuple[float, float]]) -> float:
    """Exact measure of {t : F-bar(t) > 0} over [t_1, t_N], as a fraction."""
    if len(knots) == 1:
        return 1.0 if knots[0][1] > 0 else 0.0
    total = knots[-1][0] - knots[0][0]
    positive = 0.0
    for (t0, y0), (t1, y1) in zip(knots, knots[1:]):
        dt = t1 - t0
        if y0 > 0 and y1 > 0:
            positive += dt
        elif y0 <= 0 and y1 <= 0:
            if y0 == 0 and y1 == 0:
                continue
            continue
        else:
            # one strict sign change; the crossing splits the segment
            tc = t0 + dt * (0.0 - y0) / (y1 - y0)
            if y0 > 0:
                positive += tc - t0
            else:
                positive += t1 - tc
    return positive / total


def _intervals(knots: list[tuple[float, float]]) -> list[TrendInterval]:
    """Merge consecutive knot-to-knot segments of equal slope sign."""
    if len(knots) == 1:
        t = knots[0][0]
        return [TrendInterval(t, t, "flat")]
    out: list[TrendInterval] = []
    for (t0, y0), (t1, y1) in zip(knots, knots[1:]):
        slope = (y1 - y0) / (t1 - t0)
        direction = "rising" if slope > 0 else "falling" if slope < 0 else "flat"
        if out and out[-1].direction == direction:
            out[-1] = TrendInterval(out[-1].start, t1, direction)
        else:
            out.append(TrendInterval(t0, t1, direction))
    return out


def summarize(track: Track, w: Weights) -> TrackSummary:
    """Statistics over the exact piecewise-linear F and F-bar."""
    if len(track) == 0:
        raise EmptyTrack(f"track {track.subject!r} has no moments")
    acc = accumulate(track)
    values = acc.values
    # F_i is linear between knots, so the extremes sit at knots.
    axis_min = tuple(min(v[i] for v in values) for i in range(3))
    axis_max = tuple(max(v[i] for v in values) for i in range(3))
    knots = _fbar_knots(acc, w)
    return TrackSummary(
        subject=track.subject,
        kind=track.kind,
        count=len(track),
        final_accumulated=values[-1],
        axis_min=axis_min,
        axis_max=axis_max,
        positive_fraction=_positive_fraction(knots),
        intervals=tuple(_intervals(knots)),
    )


@dataclass(frozen=True)
class ComparisonReport:
    subjects: tuple[str, ...]
    offset_minutes: float
    window: tuple[float, float]
    times: tuple[float, ...]
    series: dict  # subject -> tuple of F-bar samples
    similarity: tuple[tuple[float, ...], ...]
    final_values: dict  # subject -> F-bar at window end
    areas: dict  # subject -> trapezoid area under F-bar over the window
    ranking: tuple[str, ...]  # by final value, descending

    def to_dict(self) -> dict:
        return {
            "subjects": list(self.subjects),
            "offset_minutes": self.offset_minutes,
            "window": list(self.window),
            "times": list(self.times),
            "series": {s: list(v) for s, v in self.series.items()},
            "similarity": [list(row) for row in self.similarity],
            "final_values": dict(self.final_values),
            "areas": dict(self.areas),
            "ranking": list(self.ranking),
        }


def _pearson(a: Sequence[float], b: Sequence[float]) -> float:
    n = len(a)
    ma = sum(a) / n
    mb = sum(b) / n
    da = [x - ma for x in a]
    db = [x - mb for x in b]
    na = math.sqrt(sum(x * x for x in da))
    nb = math.sqrt(sum(x * x for x in db))
    if na == 0.0 and nb == 0.0:
        # two constant series: identical shape
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    r = sum(x * y for x, y in zip(da, db)) / (na * nb)
    return min(1.0, max(-1.0, r))


def compare(
    tracks: Sequence[Track],
    w: Weights,
    offset_minutes: float = 1.5,
    step_seconds: float = 30.0,
    labels: Sequence[str] | None = None,
) -> ComparisonReport:
    """Align, accumulate, sample F-bar on a shared grid, and correlate.

    `labels` disambiguates subjects when tracks from different films
    share a name; it defaults to the subject names.
    """
    if len(tracks) < 2:
        raise ValueError("compare requires at least two tracks")
    if labels is None:
        labels = [tr.subject for tr in tracks]
    if len(labels) != len(tracks) or len(set(labels)) != len(labels):
        raise ValueError("labels must be unique, one per track")
    aligned = align_tracks(tracks, offset_minutes)
    accs = [accumulate(tr) for tr in aligned]
    window_end = min(acc.times[-1] for acc in accs)
    if window_end <= offset_minutes:
        raise NoOverlap(
            "tracks share no time window after alignment "
            f"(window end {window_end!r} <= offset {offset_minutes!r})"
        )
    times = uniform_grid(offset_minutes, window_end, step_seconds)

    subjects = tuple(labels)
    series = {
        label: tuple(eval_accumulated_combined(acc, w, t) for t in times)
        for label, acc in zip(labels, accs)
    }
    sim = tuple(
        tuple(_pearson(series[a], series[b]) for b in subjects) for a in subjects
    )
    final_values = {
        label: eval_accumulated_combined(acc, w, window_end)
        for label, acc in zip(labels, accs)
    }
    areas = {}
    for label in subjects:
        ys = series[label]
        area = sum(
            0.5 * (ys[i] + ys[i + 1]) * (times[i + 1] - times[i])
            for i in range(len(times) - 1)
        )
        areas[label] = area
    ranking = tuple(
        sorted(subjects, key=lambda s: (-final_values[s], s))
    )
    return ComparisonReport(
        subjects=subjects,
        offset_minutes=offset_minutes,
        window=(offset_minutes, window_end),
        times=tuple(times),
        series=series,
        similarity=sim,
        final_values=final_values,
        areas=areas,
        ranking=ranking,
    )
