"""Color-chart encoding of moments.

The cube [-1, 1]^3 maps onto RGB space by c = (m + 1) / 2 per channel,
so a subject's moments over time become one colored raster row.
Accumulated values can leave the cube; they are either clamped
(component truncation, comparable across charts) or rescaled (a global
affine map sending the series min/max to -1/+1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from io import BytesIO
from typing import Sequence, Union

from .curves import (
    AccumulatedTrack,
    Vec3,
    accumulate,
    eval_accumulated,
    eval_instant,
)
from .errors import EmptyTrack
from .model import MomentVector, Track, Weights

STRIP_MODES = ("instant", "accumulated-clamped", "accumulated-rescaled")

DEFAULT_ROW_HEIGHT = 24
DEFAULT_SECONDS_PER_PIXEL = 1.0


@dataclass(frozen=True)
class RgbColor:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for ch in (self.r, self.g, self.b):
            if not 0.0 <= ch <= 1.0:
                raise ValueError(f"channel outside [0, 1]: {ch!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)


def moment_to_rgb(m: MomentVector) -> RgbColor:
    """c = (m + I) / 2; the cube-to-RGB isomorphism."""
    return RgbColor((m.m0 + 1.0) / 2.0, (m.m1 + 1.0) / 2.0, (m.m2 + 1.0) / 2.0)


def rgb_to_moment(c: RgbColor) -> MomentVector:
    """Exact inverse: m = 2c - I."""
    return MomentVector(2.0 * c.r - 1.0, 2.0 * c.g - 1.0, 2.0 * c.b - 1.0)


def clamp_to_cube(value: Sequence[float]) -> MomentVector:
    """Component-wise truncation of an accumulated value into the cube."""
    return MomentVector(*(min(1.0, max(-1.0, float(v))) for v in value))


def rescale_series(entries: Sequence[Sequence[float]]) -> list[MomentVector]:
    """Affine map over the whole series: global min -> -1, global max -> +1.

    A constant series has no range to map; per contract it yields all-zero
    vectors (the caller can detect this via series_range).
    """
    lo, hi = series_range(entries)
    if hi == lo:
        return [MomentVector(0.0, 0.0, 0.0) for _ in entries]
    out = []
    for e in entries:
        comps = [2.0 * (float(v) - lo) / (hi - lo) - 1.0 for v in e]
        # The extremes map to +/-1 exactly by construction; interior values
        # can pick up an ulp of overshoot.
        comps = [min(1.0, max(-1.0, v)) for v in comps]
        out.append(MomentVector(*comps))
    return out


def series_range(entries: Sequence[Sequence[float]]) -> tuple[float, float]:
    """Global (min, max) over all components of all entries."""
    if not entries:
        raise EmptyTrack("rescale_series requires at least one entry")
    flat = [float(v) for e in entries for v in e]
    return (min(flat), max(flat))


@dataclass(frozen=True)
class ChartImage:
    """Raster strip: one row band per subject, x axis is film time."""

    width: int
    height: int
    pixels: tuple  # row-major; (r, g, b) floats in rgb mode, float in gray
    color_mode: str  # "rgb" | "gray"
    subjects: tuple[str, ...]
    start_minute: float
    seconds_per_pixel: float
    row_height: int

    def to_ppm(self) -> bytes:
        """P6 (rgb) or P5 (gray) binary image; the golden-test format."""
        buf = bytearray()
        if self.color_mode == "rgb":
            buf += f"P6\n{self.width} {self.height}\n255\n".encode()
            for row in self.pixels:
                for px in row:
                    buf += bytes(_quantize(ch) for ch in px)
        else:
            buf += f"P5\n{self.width} {self.height}\n255\n".encode()
            for row in self.pixels:
                buf += bytes(_quantize(px) for px in row)
        return bytes(buf)

    def to_png(self) -> bytes:
        from PIL import Image

        if self.color_mode == "rgb":
            img = Image.new("RGB", (self.width, self.height))
            data = [
                tuple(_quantize(ch) for ch in px)
                for row in self.pixels
                for px in row
            ]
        else:
            img = Image.new("L", (self.width, self.height))
            data = [_quantize(px) for row in self.pixels for px in row]
        img.putdata(data)
        out = BytesIO()
        img.save(out, format="PNG")
        return out.getvalue()

    def metadata(self) -> dict:
        """Sidecar document describing the axis calibration."""
        return {
            "width": self.width,
            "height": self.height,
            "color_mode": self.color_mode,
            "subjects": list(self.subjects),
            "start_minute": self.start_minute,
            "seconds_per_pixel": self.seconds_per_pixel,
            "row_height": self.row_height,
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=2) + "\n"


def _quantize(channel: float) -> int:
    # Half-up rounding, fixed for reproducible goldens.
    return min(255, max(0, int(math.floor(channel * 255.0 + 0.5))))


Source = Union[Track, AccumulatedTrack]


def _as_accumulated(source: Source) -> AccumulatedTrack:
    if isinstance(source, AccumulatedTrack):
        return source
    return accumulate(source)


def _strip_geometry(
    sources: Sequence[Source], start_minute: float, seconds_per_pixel: float
) -> tuple[int, float]:
    end = max(s.times[-1] for s in sources)
    duration_seconds = max(0.0, (end - start_minute) * 60.0)
    width = max(1, math.ceil(duration_seconds / seconds_per_pixel))
    return width, end


def _mode_sampler(source: Source, mode: str):
    """Returns t -> MomentVector for the chosen strip mode."""
    if mode == "instant":
        if isinstance(source, AccumulatedTrack):
            raise ValueError("instant mode requires a raw track")
        return lambda t: clamp_to_cube(eval_instant(source, t))
    acc = _as_accumulated(source)
    if mode == "accumulated-clamped":
        return lambda t: clamp_to_cube(eval_accumulated(acc, t))
    if mode == "accumulated-rescaled":
        lo, hi = series_range([v for _, v in acc.entries])
        if hi == lo:
            return lambda t: MomentVector(0.0, 0.0, 0.0)

        def mapped(t: float) -> MomentVector:
            raw = eval_accumulated(acc, t)
            comps = [2.0 * (v - lo) / (hi - lo) - 1.0 for v in raw]
            return MomentVector(*(min(1.0, max(-1.0, v)) for v in comps))

        return mapped
    raise ValueError(f"unknown strip mode {mode!r}")


def render_strip(
    sources: Union[Source, Sequence[Source]],
    mode: str = "instant",
    seconds_per_pixel: float = DEFAULT_SECONDS_PER_PIXEL,
    row_height: int = DEFAULT_ROW_HEIGHT,
    start_minute: float = 0.0,
) -> ChartImage:
    """One colored band per subject; pixel color from the function value
    at the pixel-center time.  Bands are separated by 1-px black rows."""
    if isinstance(sources, (Track, AccumulatedTrack)):
        sources = [sources]
    if not sources:
        raise EmptyTrack("render_strip requires at least one track")
    for s in sources:
        if len(s) == 0:
            raise EmptyTrack(f"track {s.subject!r} has no moments")
    width, _ = _strip_geometry(sources, start_minute, seconds_per_pixel)
    samplers = [_mode_sampler(s, mode) for s in sources]

    rows: list[tuple] = []
    for idx, sampler in enumerate(samplers):
        if idx > 0:
            rows.append(tuple((0.0, 0.0, 0.0) for _ in range(width)))
        band = []
        for x in range(width):
            t = start_minute + (x + 0.5) * seconds_per_pixel / 60.0
            band.append(moment_to_rgb(sampler(t)).as_tuple())
        band = tuple(band)
        rows.extend([band] * row_height)

    return ChartImage(
        width=width,
        height=len(rows),
        pixels=tuple(rows),
        color_mode="rgb",
        subjects=tuple(s.subject for s in sources),
        start_minute=start_minute,
        seconds_per_pixel=seconds_per_pixel,
        row_height=row_height,
    )


def render_grayscale_strip(
    sources: Union[Source, Sequence[Source]],
    w: Weights,
    mode: str = "instant",
    seconds_per_pixel: float = DEFAULT_SECONDS_PER_PIXEL,
    row_height: int = DEFAULT_ROW_HEIGHT,
    start_minute: float = 0.0,
) -> ChartImage:
    """Single-channel variant: gray level (f-bar + 1) / 2, readable as
    overall positive vs. negative emotion."""
    if isinstance(sources, (Track, AccumulatedTrack)):
        sources = [sources]
    if not sources:
        raise EmptyTrack("render_grayscale_strip requires at least one track")
    for s in sources:
        if len(s) == 0:
            raise EmptyTrack(f"track {s.subject!r} has no moments")
    width, _ = _strip_geometry(sources, start_minute, seconds_per_pixel)
    samplers = [_mode_sampler(s, mode) for s in sources]

    rows: list[tuple] = []
    for idx, sampler in enumerate(samplers):
        if idx > 0:
            rows.append(tuple(0.0 for _ in range(width)))
        band = []
        for x in range(width):
            t = start_minute + (x + 0.5) * seconds_per_pixel / 60.0
            m = sampler(t)
            fbar = w.a0 * m.m0 + w.a1 * m.m1 + w.a2 * m.m2
            band.append(min(1.0, max(0.0, (fbar + 1.0) / 2.0)))
        band = tuple(band)
        rows.extend([band] * row_height)

    return ChartImage(
        width=width,
        height=len(rows),
        pixels=tuple(rows),
        color_mode="gray",
        subjects=tuple(s.subject for s in sources),
        start_minute=start_minute,
        seconds_per_pixel=seconds_per_pixel,
        row_height=row_height,
    )
