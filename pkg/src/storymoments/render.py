"""Deterministic SVG curve plots and 3D parametric curve export.

Identical inputs must produce byte-identical documents, so all geometry
is formatted with fixed precision and the canvas is fixed at 960x480
with 40-px margins and 2-px strokes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape

from .curves import (
    AccumulatedTrack,
    SampledSeries,
    Vec3,
    eval_accumulated,
    eval_instant,
    uniform_grid,
)
from .errors import EmptySeries, EmptyTrack
from .model import Track

CANVAS_W = 960
CANVAS_H = 480
MARGIN = 40
STROKE = 2

ROLE_COLORS = {
    "axis0": "#ff0000",
    "axis1": "#008000",
    "axis2": "#0000ff",
    "combined": "#000000",
}

ROLES = tuple(ROLE_COLORS)


@dataclass(frozen=True)
class PlotSeries:
    series: SampledSeries
    role: str  # axis0 | axis1 | axis2 | combined
    label: str = ""


@dataclass(frozen=True)
class PlotSpec:
    series: tuple[PlotSeries, ...]
    title: str = ""
    # None means auto-range with 5% padding; instant plots pass (-1, 1).
    value_range: Optional[tuple[float, float]] = None

    def __post_init__(self):
        seen = set()
        for ps in self.series:
            if ps.role not in ROLE_COLORS:
                raise ValueError(f"unknown role {ps.role!r}")
            if ps.role in seen:
                raise ValueError(f"duplicate role {ps.role!r}")
            seen.add(ps.role)


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _scalar_values(ps: PlotSeries) -> list[float]:
    if ps.role == "combined":
        return [float(v) for v in ps.series.values]
    i = int(ps.role[-1])
    return [
        float(v[i]) if isinstance(v, (tuple, list)) else float(v)
        for v in ps.series.values
    ]


def plot_curves(spec: PlotSpec) -> str:
    """Render the spec as an SVG 1.1 document (string, byte-deterministic)."""
    if not spec.series or all(len(ps.series) == 0 for ps in spec.series):
        raise EmptySeries("plot_curves requires at least one nonempty series")

    all_times = [t for ps in spec.series for t in ps.series.times]
    t_min, t_max = min(all_times), max(all_times)
    if t_max == t_min:
        t_max = t_min + 1.0

    if spec.value_range is not None:
        v_min, v_max = spec.value_range
    else:
        vals = [v for ps in spec.series for v in _scalar_values(ps)]
        lo, hi = min(vals), max(vals)
        pad = 0.05 * (hi - lo) if hi > lo else 1.0
        v_min, v_max = lo - pad, hi + pad

    inner_w = CANVAS_W - 2 * MARGIN
    inner_h = CANVAS_H - 2 * MARGIN

    def px(t: float) -> float:
        return MARGIN + (t - t_min) / (t_max - t_min) * inner_w

    def py(v: float) -> float:
        return CANVAS_H - MARGIN - (v - v_min) / (v_max - v_min) * inner_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{CANVAS_W}" height="{CANVAS_H}" '
        f'viewBox="0 0 {CANVAS_W} {CANVAS_H}">\n',
        f'<rect x="0" y="0" width="{CANVAS_W}" height="{CANVAS_H}" fill="#ffffff"/>\n',
        # frame
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{inner_w}" height="{inner_h}" '
        'fill="none" stroke="#cccccc" stroke-width="1"/>\n',
    ]
    # zero line, when zero lies inside the value range
    if v_min < 0.0 < v_max or v_min == 0.0 or v_max == 0.0:
        y0 = py(0.0)
        parts.append(
            f'<line x1="{MARGIN}" y1="{_fmt(y0)}" x2="{CANVAS_W - MARGIN}" '
            f'y2="{_fmt(y0)}" stroke="#888888" stroke-width="1" '
            'stroke-dasharray="4 4"/>\n'
        )
    if spec.title:
        parts.append(
            f'<text x="{CANVAS_W // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{escape(spec.title)}</text>\n'
        )

    legend_y = MARGIN + 16
    for ps in sorted(spec.series, key=lambda p: ROLES.index(p.role)):
        if len(ps.series) == 0:
            continue
        color = ROLE_COLORS[ps.role]
        pts = " ".join(
            f"{_fmt(px(t))},{_fmt(py(v))}"
            for t, v in zip(ps.series.times, _scalar_values(ps))
        )
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="{STROKE}" '
            f'points="{pts}"/>\n'
        )
        if ps.label:
            parts.append(
                f'<text x="{MARGIN + 8}" y="{legend_y}" font-family="sans-serif" '
                f'font-size="12" fill="{color}">{escape(ps.label)}</text>\n'
            )
            legend_y += 16

    # x-axis caption
    parts.append(
        f'<text x="{CANVAS_W // 2}" y="{CANVAS_H - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">time (minutes): '
        f'{_fmt(t_min)} to {_fmt(t_max)}</text>\n'
    )
    parts.append("</svg>\n")
    return "".join(parts)


def plot_geometry(
    times: Sequence[float], value_range: tuple[float, float]
) -> dict:
    """Expose the affine data-to-pixel map so tests can invert vertices."""
    t_min, t_max = min(times), max(times)
    if t_max == t_min:
        t_max = t_min + 1.0
    return {
        "t_min": t_min,
        "t_max": t_max,
        "v_min": value_range[0],
        "v_max": value_range[1],
        "inner_w": CANVAS_W - 2 * MARGIN,
        "inner_h": CANVAS_H - 2 * MARGIN,
        "margin": MARGIN,
        "canvas_h": CANVAS_H,
    }


def export_curve3d(
    source: Union[Track, AccumulatedTrack],
    step_seconds: float = 60.0,
    times: Optional[Sequence[float]] = None,
) -> str:
    """CSV rows "t,x,y,z" sampling the parametric 3D curve (f or F)."""
    if len(source) == 0:
        raise EmptyTrack(f"track {source.subject!r} has no moments")
    knot_times = source.times
    if times is None:
        times = uniform_grid(knot_times[0], knot_times[-1], step_seconds)
    if isinstance(source, AccumulatedTrack):
        fn = lambda t: eval_accumulated(source, t)
    else:
        fn = lambda t: eval_instant(source, t)
    lines = ["t,x,y,z"]
    for t in times:
        v = fn(t)
        lines.append(
            f"{t:.6f},{v[0]:.6f},{v[1]:.6f},{v[2]:.6f}"
        )
    return "\n".join(lines) + "\n"
