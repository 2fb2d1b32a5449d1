import random

import pytest

from storymoments.curves import (
    accumulate,
    align_tracks,
    bspline_knots,
    eval_accumulated,
    eval_accumulated_combined,
    eval_combined,
    eval_instant,
    sample,
    smooth_bspline,
    uniform_grid,
)
from storymoments.errors import DegreeTooHigh, EmptyTrack
from storymoments.model import (
    EQUAL_WEIGHTS,
    MomentVector,
    TimedMoment,
    Track,
    TrackKind,
    Weights,
)

from conftest import random_track


def track_of(*rows, subject="Marion"):
    return Track(
        subject,
        TrackKind.DISCOURSE,
        tuple(TimedMoment(t, MomentVector(*v)) for t, v in rows),
    )


class TestEvalInstant:
    def test_knot_identity(self):
        tr = track_of((1.0, (0.2, -0.3, 0.9)), (3.0, (0.8, 0.1, -0.4)))
        for tm in tr.moments:
            assert eval_instant(tr, tm.t) == tm.moment.as_tuple()

    def test_midpoint_mean(self):
        tr = track_of((1.0, (0.2, 0.4, -0.6)), (3.0, (0.8, 0.0, 0.2)))
        mid = eval_instant(tr, 2.0)
        assert mid == pytest.approx((0.5, 0.2, -0.2), abs=1e-15)

    def test_hand_interpolation(self):
        tr = track_of((1.0, (0.2, 0, 0)), (3.0, (0.8, 0, 0)))
        assert eval_instant(tr, 1.5) == pytest.approx((0.35, 0.0, 0.0), abs=1e-15)

    def test_clamps_outside(self):
        tr = track_of((1.0, (0.2, 0, 0)), (3.0, (0.8, 0, 0)))
        assert eval_instant(tr, 0.0) == (0.2, 0.0, 0.0)
        assert eval_instant(tr, 99.0) == (0.8, 0.0, 0.0)

    def test_empty_track(self):
        with pytest.raises(EmptyTrack):
            eval_instant(Track("Bob", TrackKind.DISCOURSE, ()), 1.0)

    def test_piecewise_linearity_second_difference(self):
        rng = random.Random(3)
        for _ in range(50):
            tr = random_track(rng, n_min=2)
            times = tr.times
            k = rng.randrange(len(times) - 1)
            t0, t1 = times[k], times[k + 1]
            ts = [t0 + (t1 - t0) * q for q in (0.25, 0.5, 0.75)]
            vals = [eval_instant(tr, t) for t in ts]
            for i in range(3):
                second = vals[0][i] - 2 * vals[1][i] + vals[2][i]
                assert abs(second) <= 1e-10


class TestCombined:
    def test_degenerate_weights(self):
        tr = track_of((1.0, (0.2, -0.5, 0.9)), (4.0, (0.8, 0.3, -0.1)))
        w = Weights(1, 0, 0)
        for t in (1.0, 2.3, 4.0, 7.0):
            assert eval_combined(tr, w, t) == eval_instant(tr, t)[0]

    def test_hand_mean_at_knot(self):
        tr = track_of((2.0, (0.3, -0.3, 0.6)))
        assert eval_combined(tr, EQUAL_WEIGHTS, 2.0) == pytest.approx(0.2, abs=1e-12)

    def test_constant_fixed_point(self):
        tr = track_of((1.0, (0.4, 0.4, 0.4)), (5.0, (0.4, 0.4, 0.4)))
        for w in (EQUAL_WEIGHTS, Weights(0.7, 0.2, 0.1)):
            assert eval_combined(tr, w, 3.0) == pytest.approx(0.4, abs=1e-12)

    def test_convexity_random(self):
        rng = random.Random(5)
        for _ in range(500):
            tr = random_track(rng, n_min=1, n_max=12)
            raw = [rng.random() for _ in range(3)]
            s = sum(raw)
            w = Weights(*(x / s for x in raw))
            t = rng.uniform(-5, 130)
            v = eval_instant(tr, t)
            fbar = eval_combined(tr, w, t)
            assert min(v) <= fbar <= max(v)


class TestAccumulate:
    def test_single(self):
        acc = accumulate(track_of((1.0, (0.5, 0, -0.5))))
        assert acc.entries == ((1.0, (0.5, 0.0, -0.5)),)

    def test_cancellation(self):
        acc = accumulate(track_of((1.0, (1, 0, 0)), (2.0, (-1, 0, 0))))
        assert acc.values == ((1.0, 0.0, 0.0), (0.0, 0.0, 0.0))

    def test_prefix_can_exit_cube(self):
        acc = accumulate(
            track_of((1.0, (0.4, 0.1, -0.2)), (2.0, (0.4, 0.1, -0.2)), (3.0, (0.4, 0.1, -0.2)))
        )
        assert acc.values[-1] == pytest.approx((1.2, 0.3, -0.6), abs=1e-12)

    def test_matches_bruteforce_oracle(self):
        rng = random.Random(9)
        for _ in range(100):
            tr = random_track(rng)
            acc = accumulate(tr)
            for K in range(1, len(tr) + 1):
                expect = tuple(
                    sum(tm.moment[i] for tm in tr.moments[:K]) for i in range(3)
                )
                assert acc.values[K - 1] == expect  # same summation order: exact


class TestEvalAccumulated:
    def test_knot_identity(self):
        acc = accumulate(track_of((1.0, (0.5, 0, 0)), (2.0, (0.5, 0, 0))))
        assert eval_accumulated(acc, 1.0) == (0.5, 0.0, 0.0)
        assert eval_accumulated(acc, 2.0) == (1.0, 0.0, 0.0)

    def test_zero_before_first(self):
        acc = accumulate(track_of((1.0, (0.5, 0, 0))))
        assert eval_accumulated(acc, 0.5) == (0.0, 0.0, 0.0)

    def test_hand_interpolation(self):
        acc = accumulate(track_of((1.0, (0.5, 0, 0)), (2.0, (0.5, 0, 0))))
        assert eval_accumulated(acc, 1.5) == pytest.approx((0.75, 0.0, 0.0), abs=1e-15)

    def test_clamps_after_last(self):
        acc = accumulate(track_of((1.0, (0.5, 0, 0)), (2.0, (0.5, 0, 0))))
        assert eval_accumulated(acc, 50.0) == (1.0, 0.0, 0.0)

    def test_monotone_for_sign_constrained(self):
        rng = random.Random(13)
        for sign in (+1, -1):
            for _ in range(30):
                tr = random_track(rng, n_min=2, sign=sign)
                acc = accumulate(tr)
                ts = sorted(rng.uniform(0, 125) for _ in range(20))
                vals = [eval_accumulated(acc, t) for t in ts]
                for a, b in zip(vals, vals[1:]):
                    for i in range(3):
                        if sign > 0:
                            assert b[i] >= a[i] - 1e-12
                        else:
                            assert b[i] <= a[i] + 1e-12

    def test_combined_hand_mean(self):
        acc = accumulate(
            track_of((1.0, (0.4, 0.1, -0.2)), (2.0, (0.4, 0.1, -0.2)), (3.0, (0.4, 0.1, -0.2)))
        )
        got = eval_accumulated_combined(acc, EQUAL_WEIGHTS, 3.0)
        assert got == pytest.approx(0.3, abs=1e-12)

    def test_combined_degenerate_weights(self):
        acc = accumulate(track_of((1.0, (0.1, 0.7, -0.3)), (4.0, (0.2, -0.4, 0.1))))
        w = Weights(0, 1, 0)
        for t in (0.0, 1.0, 2.5, 4.0, 9.0):
            assert eval_accumulated_combined(acc, w, t) == eval_accumulated(acc, t)[1]


# --- independent B-spline oracle (naive Cox-de Boor basis summation) --------

def naive_basis(knots, i, p, u, domain_end):
    if p == 0:
        # half-open spans, except the curve domain end is closed
        if knots[i] <= u < knots[i + 1]:
            return 1.0
        if u == domain_end and knots[i] < knots[i + 1] <= domain_end and knots[i + 1] == domain_end:
            return 1.0
        return 0.0
    left = 0.0
    if knots[i + p] != knots[i]:
        left = (u - knots[i]) / (knots[i + p] - knots[i]) * naive_basis(
            knots, i, p - 1, u, domain_end
        )
    right = 0.0
    if knots[i + p + 1] != knots[i + 1]:
        right = (knots[i + p + 1] - u) / (knots[i + p + 1] - knots[i + 1]) * naive_basis(
            knots, i + 1, p - 1, u, domain_end
        )
    return left + right


def naive_bspline(times, controls, p, u):
    knots = bspline_knots(times, p)
    n = len(controls)
    domain_end = knots[n]
    out = [0.0, 0.0, 0.0]
    for i in range(n):
        b = naive_basis(knots, i, p, u, domain_end)
        for c in range(3):
            out[c] += b * controls[i][c]
    return tuple(out)


class TestSmoothBspline:
    def test_degree1_matches_instant(self):
        rng = random.Random(21)
        for _ in range(100):
            tr = random_track(rng, n_min=2, n_max=20)
            for _ in range(10):
                t = rng.uniform(-2, 125)
                a = smooth_bspline(tr, 1, t)
                b = eval_instant(tr, t)
                for i in range(3):
                    assert abs(a[i] - b[i]) <= 1e-12

    def test_degree1_matches_accumulated(self):
        rng = random.Random(22)
        for _ in range(50):
            tr = random_track(rng, n_min=2, n_max=20)
            acc = accumulate(tr)
            for _ in range(10):
                t = rng.uniform(-2, 125)
                a = smooth_bspline(acc, 1, t)
                b = eval_accumulated(acc, t)
                for i in range(3):
                    assert abs(a[i] - b[i]) <= 1e-12

    def test_degree2_partition_of_unity(self):
        tr = track_of((1.0, (0.4, 0.4, 0.4)), (3.0, (0.4, 0.4, 0.4)), (7.0, (0.4, 0.4, 0.4)))
        for t in (1.0, 2.0, 4.0, 6.9, 7.0):
            v = smooth_bspline(tr, 2, t)
            assert v == pytest.approx((0.4, 0.4, 0.4), abs=1e-12)

    def test_degree2_three_points_against_oracle(self):
        tr = track_of((1.0, (0.2, -0.5, 0.9)), (3.0, (0.8, 0.1, -0.4)), (7.0, (-0.3, 0.6, 0.2)))
        times = tr.times
        controls = [tm.moment.as_tuple() for tm in tr.moments]
        t = (times[0] + times[-1]) / 2.0
        got = smooth_bspline(tr, 2, t)
        want = naive_bspline(times, controls, 2, t)
        for i in range(3):
            assert abs(got[i] - want[i]) <= 1e-12

    def test_degrees_2_3_against_oracle_random(self):
        rng = random.Random(31)
        for p in (2, 3):
            for _ in range(50):
                tr = random_track(rng, n_min=p + 1, n_max=15)
                times = tr.times
                controls = [tm.moment.as_tuple() for tm in tr.moments]
                for _ in range(5):
                    t = rng.uniform(times[0], times[-1])
                    got = smooth_bspline(tr, p, t)
                    want = naive_bspline(times, controls, p, t)
                    for i in range(3):
                        assert abs(got[i] - want[i]) <= 1e-9

    def test_degree_too_high(self):
        tr = track_of((1.0, (0, 0, 0)), (2.0, (0, 0, 0)))
        with pytest.raises(DegreeTooHigh):
            smooth_bspline(tr, 2, 1.5)

    def test_interpolates_endpoints(self):
        tr = track_of((1.0, (0.3, 0, 0)), (2.0, (0.5, 0, 0)), (4.0, (-0.2, 0, 0)))
        assert smooth_bspline(tr, 2, 1.0)[0] == pytest.approx(0.3, abs=1e-12)
        assert smooth_bspline(tr, 2, 4.0)[0] == pytest.approx(-0.2, abs=1e-12)


class TestAlign:
    def test_fixed_point(self):
        tr = track_of((1.5, (0.1, 0, 0)), (4.0, (0.2, 0, 0)))
        (out,) = align_tracks([tr], 1.5)
        assert out.times == tr.times

    def test_shift(self):
        tr = track_of((10.0, (0.1, 0, 0)), (20.0, (0.2, 0, 0)))
        (out,) = align_tracks([tr], 1.5)
        assert out.times == (1.5, 11.5)

    def test_first_exact_and_gaps(self):
        rng = random.Random(41)
        tracks = [random_track(rng, n_min=2, dyadic=True) for _ in range(10)]
        aligned = align_tracks(tracks, 1.5)
        for before, after in zip(tracks, aligned):
            assert after.times[0] == 1.5
            gaps_before = [b - a for a, b in zip(before.times, before.times[1:])]
            gaps_after = [b - a for a, b in zip(after.times, after.times[1:])]
            assert gaps_after == gaps_before
            assert [tm.moment for tm in after.moments] == [tm.moment for tm in before.moments]

    def test_empty_rejected(self):
        with pytest.raises(EmptyTrack):
            align_tracks([Track("Bob", TrackKind.DISCOURSE, ())])


class TestSample:
    def test_knot_identity_via_explicit_grid(self):
        tr = track_of((1.0, (0.2, 0.1, 0)), (3.0, (0.8, -0.1, 0)))
        series = sample("instant", tr, times=tr.times)
        assert series.values == tuple(tm.moment.as_tuple() for tm in tr.moments)

    def test_combined_consistency(self):
        tr = track_of((1.0, (0.2, 0.1, 0)), (3.0, (0.8, -0.1, 0.4)))
        series = sample("accumulated-combined", tr, w=EQUAL_WEIGHTS, step_seconds=10)
        acc = accumulate(tr)
        for t, v in zip(series.times, series.values):
            assert v == eval_accumulated_combined(acc, EQUAL_WEIGHTS, t)

    def test_empty_grid(self):
        tr = track_of((1.0, (0.2, 0.1, 0)))
        series = sample("instant", tr, times=[])
        assert len(series) == 0

    def test_default_step_is_one_second(self):
        tr = track_of((0.0, (0, 0, 0)), (1.0, (0.5, 0, 0)))
        series = sample("instant", tr)
        assert len(series.times) == 61
        assert series.times[1] - series.times[0] == pytest.approx(1 / 60)

    def test_grid_includes_endpoints(self):
        grid = uniform_grid(1.0, 2.5, 40.0)
        assert grid[0] == 1.0
        assert grid[-1] == 2.5
