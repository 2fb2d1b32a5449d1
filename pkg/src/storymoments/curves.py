"""Curve evaluation over tracks.

The instant functions f_i(t) linearly interpolate a track's moment
components (a first-degree non-uniform B-spline).  Prefix-summing the
moments and interpolating gives the accumulated functions F_i(t), whose
slope sign reads as growing or shrinking audience attachment.  Either
family collapses to a single function via a barycentric (convex) average.

Out-of-domain policy: f clamps to the endpoint values; F is zero before
the first moment (nothing accumulated yet) and holds the final sum after
the last.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .errors import DegreeTooHigh, EmptyTrack
from .model import Track, TrackKind, Weights

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class AccumulatedTrack:
    """Per-axis prefix sums of a track; components may leave [-1, 1]."""

    subject: str
    kind: TrackKind
    entries: tuple[tuple[float, Vec3], ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.entries)

    @property
    def values(self) -> tuple[Vec3, ...]:
        return tuple(v for _, v in self.entries)


@dataclass(frozen=True)
class SampledSeries:
    """Evaluations of one curve function on a time grid."""

    times: tuple[float, ...]
    values: tuple  # per-time Vec3, or float for combined functions
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)


def _require_nonempty(n: int, what: str) -> None:
    if n == 0:
        raise EmptyTrack(f"{what} has no moments")


def _lerp_segment(
    times: Sequence[float], values: Sequence[Vec3], t: float
) -> Vec3:
    """Piecewise-linear interpolation with endpoint clamping."""
    if t <= times[0]:
        return values[0]
    if t >= times[-1]:
        return values[-1]
    k = bisect_right(times, t) - 1
    t0, t1 = times[k], times[k + 1]
    w0 = (t1 - t) / (t1 - t0)
    w1 = (t - t0) / (t1 - t0)
    a, b = values[k], values[k + 1]
    return (
        a[0] * w0 + b[0] * w1,
        a[1] * w0 + b[1] * w1,
        a[2] * w0 + b[2] * w1,
    )


def eval_instant(track: Track, t: float) -> Vec3:
    """f_i(t): linear interpolation of the raw moments, clamped outside."""
    _require_nonempty(len(track), f"track {track.subject!r}")
    times = track.times
    values = [tm.moment.as_tuple() for tm in track.moments]
    return _lerp_segment(times, values, t)


def _convex(v: Vec3, w: Weights) -> float:
    # Clamp to [min, max] of the components: rounding in the weighted sum
    # must not be allowed to break the convexity guarantee.
    s = w.a0 * v[0] + w.a1 * v[1] + w.a2 * v[2]
    return min(max(v), max(min(v), s))


def eval_combined(track: Track, w: Weights, t: float) -> float:
    """f-bar(t): convex combination of the three axis functions."""
    return _convex(eval_instant(track, t), w)


def accumulate(track: Track) -> AccumulatedTrack:
    """Component-wise prefix sums, left to right, at the track's times."""
    _require_nonempty(len(track), f"track {track.subject!r}")
    entries: list[tuple[float, Vec3]] = []
    s0 = s1 = s2 = 0.0
    for tm in track.moments:
        s0 += tm.moment.m0
        s1 += tm.moment.m1
        s2 += tm.moment.m2
        entries.append((tm.t, (s0, s1, s2)))
    return AccumulatedTrack(track.subject, track.kind, tuple(entries))


def eval_accumulated(acc: AccumulatedTrack, t: float) -> Vec3:
    """F_i(t): interpolated prefix sums; zero before the first moment."""
    _require_nonempty(len(acc), f"accumulated track {acc.subject!r}")
    if t < acc.entries[0][0]:
        return (0.0, 0.0, 0.0)
    return _lerp_segment(acc.times, acc.values, t)


def eval_accumulated_combined(acc: AccumulatedTrack, w: Weights, t: float) -> float:
    """F-bar(t): convex combination of the accumulated axis functions."""
    return _convex(eval_accumulated(acc, t), w)


# --- degree-p non-uniform B-spline smoothing -------------------------------

def bspline_knots(times: Sequence[float], degree: int) -> list[float]:
    """Clamped knot vector for the given parameter times.

    Ends are repeated degree+1 times; interior knots come from averaging
    runs of `degree` consecutive times, which for degree 1 reduces to the
    times themselves (so the curve is the plain linear interpolant).
    """
    n = len(times)
    p = degree
    knots = [times[0]] * (p + 1)
    for j in range(1, n - p):
        knots.append(sum(times[j : j + p]) / p)
    knots.extend([times[-1]] * (p + 1))
    return knots


def _find_span(knots: Sequence[float], degree: int, n_ctrl: int, u: float) -> int:
    """Index k with knots[k] <= u < knots[k+1], capped at the domain end."""
    if u >= knots[n_ctrl]:
        return n_ctrl - 1
    lo, hi = degree, n_ctrl - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if knots[mid] <= u:
            lo = mid
        else:
            hi = mid - 1
    return lo


def de_boor(
    knots: Sequence[float],
    controls: Sequence[Vec3],
    degree: int,
    u: float,
) -> Vec3:
    """Evaluate a B-spline curve at parameter u via De Boor's recurrence."""
    p = degree
    k = _find_span(knots, p, len(controls), u)
    d = [list(controls[k - p + j]) for j in range(p + 1)]
    for r in range(1, p + 1):
        for j in range(p, r - 1, -1):
            i = k - p + j
            denom = knots[i + p - r + 1] - knots[i]
            alpha = 0.0 if denom == 0.0 else (u - knots[i]) / denom
            for c in range(3):
                d[j][c] = (1.0 - alpha) * d[j - 1][c] + alpha * d[j][c]
    return (d[p][0], d[p][1], d[p][2])


def smooth_bspline(
    source: Union[Track, AccumulatedTrack], degree: int, t: float
) -> Vec3:
    """Degree-p smoothing of a track or its accumulation.

    Control values are the moment (or prefix-sum) components; degree 1
    therefore agrees with eval_instant / eval_accumulated everywhere,
    including the out-of-domain policy.
    """
    if degree < 1:
        raise DegreeTooHigh(f"degree must be >= 1, got {degree}")
    if isinstance(source, AccumulatedTrack):
        _require_nonempty(len(source), f"accumulated track {source.subject!r}")
        times = source.times
        controls = source.values
        before: Vec3 = (0.0, 0.0, 0.0)
    else:
        _require_nonempty(len(source), f"track {source.subject!r}")
        times = source.times
        controls = tuple(tm.moment.as_tuple() for tm in source.moments)
        before = controls[0]
    if len(controls) < degree + 1:
        raise DegreeTooHigh(
            f"degree {degree} needs at least {degree + 1} control points, "
            f"got {len(controls)}"
        )
    if t < times[0]:
        return before
    if t >= times[-1]:
        return controls[-1]
    knots = bspline_knots(times, degree)
    return de_boor(knots, controls, degree, t)


# --- alignment and sampling -------------------------------------------------

def align_tracks(tracks: Sequence[Track], offset_minutes: float = 1.5) -> list[Track]:
    """Translate each track so its first moment sits at the offset.

    New timestamps are offset + (t_k - t_1), so the first timestamp is
    exactly the offset and relative spacing is preserved.
    """
    out = []
    for track in tracks:
        _require_nonempty(len(track), f"track {track.subject!r}")
        t1 = track.moments[0].t
        shifted = tuple(
            type(tm)(offset_minutes + (tm.t - t1), tm.moment, tm.note)
            for tm in track.moments
        )
        out.append(Track(track.subject, track.kind, shifted))
    return out


def align_accumulated(
    accs: Sequence[AccumulatedTrack], offset_minutes: float = 1.5
) -> list[AccumulatedTrack]:
    """Same translation as align_tracks, applied to accumulated entries."""
    out = []
    for acc in accs:
        _require_nonempty(len(acc), f"accumulated track {acc.subject!r}")
        t1 = acc.entries[0][0]
        entries = tuple(
            (offset_minutes + (t - t1), v) for t, v in acc.entries
        )
        out.append(AccumulatedTrack(acc.subject, acc.kind, entries))
    return out


DEFAULT_STEP_SECONDS = 1.0

SELECTORS = (
    "instant",
    "combined",
    "accumulated",
    "accumulated-combined",
    "smoothed",
    "smoothed-accumulated",
)


def uniform_grid(t_start: float, t_end: float, step_seconds: float) -> list[float]:
    """Minute grid from t_start to t_end; always includes both endpoints."""
    if t_end < t_start:
        return []
    step_min = step_seconds / 60.0
    n = int((t_end - t_start) / step_min + 1e-9)
    times = [t_start + k * step_min for k in range(n + 1)]
    if times[-1] < t_end - 1e-12:
        times.append(t_end)
    else:
        times[-1] = min(times[-1], t_end)
    return times


def sample(
    selector: str,
    track: Track,
    w: Optional[Weights] = None,
    degree: Optional[int] = None,
    step_seconds: float = DEFAULT_STEP_SECONDS,
    times: Optional[Sequence[float]] = None,
) -> SampledSeries:
    """Evaluate the selected function on a grid.

    The grid is either explicit `times` or uniform with `step_seconds`
    over the track's time span.
    """
    if selector not in SELECTORS:
        raise ValueError(f"unknown selector {selector!r}")
    _require_nonempty(len(track), f"track {track.subject!r}")

    needs_acc = "accumulated" in selector
    acc = accumulate(track) if needs_acc else None
    fn: Callable[[float], object]
    if selector == "instant":
        fn = lambda t: eval_instant(track, t)
    elif selector == "combined":
        fn = lambda t: eval_combined(track, w, t)
    elif selector == "accumulated":
        fn = lambda t: eval_accumulated(acc, t)
    elif selector == "accumulated-combined":
        fn = lambda t: eval_accumulated_combined(acc, w, t)
    elif selector == "smoothed":
        fn = lambda t: smooth_bspline(track, degree, t)
    else:  # smoothed-accumulated
        fn = lambda t: smooth_bspline(acc, degree, t)

    if ("combined" in selector) and w is None:
        raise ValueError("combined selectors require weights")
    if selector.startswith("smoothed") and degree is None:
        raise ValueError("smoothed selectors require a degree")

    if times is None:
        ts = track.times
        times = uniform_grid(ts[0], ts[-1], step_seconds)
    times = tuple(float(t) for t in times)

    provenance = {"function": selector, "step_seconds": step_seconds}
    if w is not None:
        provenance["weights"] = list(w.as_tuple())
    if degree is not None:
        provenance["degree"] = degree
    return SampledSeries(times, tuple(fn(t) for t in times), provenance)
