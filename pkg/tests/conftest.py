import random
from pathlib import Path

import pytest

from storymoments.model import MomentVector, TimedMoment, Track, TrackKind

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def random_track(
    rng: random.Random,
    subject: str = "Marion",
    n_min: int = 1,
    n_max: int = 50,
    t_max: float = 120.0,
    sign: int = 0,
    dyadic: bool = False,
) -> Track:
    """Random discourse track; sign=+1/-1 constrains component signs,
    dyadic=True snaps times to multiples of 1/64 minute (exact floats)."""
    n = rng.randint(n_min, n_max)
    times = sorted(rng.sample(range(1, int(t_max * 64)), n))
    moments = []
    for k in times:
        t = k / 64.0 if dyadic else k / 64.0 + rng.random() / 256.0
        comps = []
        for _ in range(3):
            v = rng.uniform(-1.0, 1.0)
            if sign > 0:
                v = abs(v)
            elif sign < 0:
                v = -abs(v)
            comps.append(v)
        moments.append(TimedMoment(t, MomentVector(*comps)))
    return Track(subject, TrackKind.DISCOURSE, tuple(moments))
