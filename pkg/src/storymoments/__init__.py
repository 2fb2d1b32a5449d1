"""Toolkit for recording, computing, and visualizing storytelling moments."""

from .model import (
    Axis,
    DISCOURSE_AXES,
    EQUAL_WEIGHTS,
    MomentPoint,
    MomentVector,
    RotationAxis,
    STORY_AXES,
    Session,
    TimedMoment,
    Track,
    TrackKind,
    Weights,
    dot_similarity,
    make_moment,
    point_average,
    rotate_axes_90,
    to_point,
)
from .curves import (
    AccumulatedTrack,
    SampledSeries,
    accumulate,
    align_tracks,
    eval_accumulated,
    eval_accumulated_combined,
    eval_combined,
    eval_instant,
    sample,
    smooth_bspline,
)

__version__ = "0.1.0"
