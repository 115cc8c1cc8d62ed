import math

import numpy as np
import pytest

from smaug.features import (
    FUSION_SEQ_FEATURES,
    MOTION_STATS,
    SEQ_STATS,
    STROKE_SCALARS,
    STROKE_SEQ_FEATURES,
    am,
    kurt,
    mad,
    motion_fusion_features,
    motion_orders,
    motion_round_features,
    pearson,
    rms,
    seq_stats,
    skew,
    stdev,
    touch_event_features,
    touch_round_features,
    touch_stroke_features,
    var,
)
from smaug.preprocess import FusionEvent, correct_touch_actions, determine_strokes
from smaug.trace import Sensor, TouchAction

from .conftest import MS, motion, simple_stroke, touch


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def oracle_stats(values):
    """Definitional implementations, coded independently."""
    v = [float(x) for x in values]
    n = len(v)
    mean = sum(v) / n
    out = {"min": min(v), "max": max(v), "am": mean}
    out["rms"] = math.sqrt(sum(x * x for x in v) / n)
    if n < 2:
        out.update(var=0.0, stdev=0.0, mad=0.0, skew=0.0, kurt=0.0)
        return out
    out["var"] = sum((x - mean) ** 2 for x in v) / (n - 1)
    sd = math.sqrt(out["var"])
    out["stdev"] = sd
    out["mad"] = math.sqrt(sum(abs(x - mean) for x in v) / (n - 1))
    if sd == 0.0:
        out["skew"] = out["kurt"] = 0.0
    else:
        out["skew"] = sum(((x - mean) / sd) ** 3 for x in v) / (n - 1)
        out["kurt"] = sum(((x - mean) / sd) ** 4 for x in v) / (n - 1)
    return out


def test_stats_against_oracle():
    rng = np.random.default_rng(7)
    for _ in range(100):
        v = rng.normal(scale=rng.uniform(0.1, 50), size=rng.integers(1, 40))
        expect = oracle_stats(v)
        got = seq_stats(v)
        for name in SEQ_STATS:
            assert got[name] == pytest.approx(expect[name], rel=1e-12, abs=1e-300)


def test_hand_values():
    x = [0, 1, 2, 3]
    assert am(x) == 1.5
    assert var(x) == pytest.approx(5 / 3)
    assert stdev(x) == pytest.approx(math.sqrt(5 / 3))
    assert skew([-2, 0, 2]) == 0.0


def test_constant_sequence_conventions():
    got = seq_stats([1, 1, 1, 1])
    assert got == {
        "min": 1.0,
        "max": 1.0,
        "am": 1.0,
        "rms": 1.0,
        "var": 0.0,
        "stdev": 0.0,
        "mad": 0.0,
        "skew": 0.0,
        "kurt": 0.0,
    }


def test_empty_and_singleton():
    assert var([5.0]) == 0.0
    assert mad([5.0]) == 0.0
    assert skew([5.0]) == 0.0
    assert kurt([5.0]) == 0.0
    assert rms([3.0]) == 3.0


def test_pearson_oracle_and_bounds():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a = rng.normal(size=10)
        b = rng.normal(size=10)
        r = pearson(a, b)
        assert -1.0 <= r <= 1.0
        expect = np.corrcoef(a, b)[0, 1]
        assert r == pytest.approx(expect, rel=1e-12)
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson([1, 1, 1], [1, 2, 3]) == 0.0


# ---------------------------------------------------------------------------
# touch event features
# ---------------------------------------------------------------------------

def test_uniform_motion_velocity():
    evs = [
        touch(0, TouchAction.DOWN, x=0),
        touch(10, TouchAction.MOVE, x=10),
        touch(20, TouchAction.UP, x=20),
    ]
    f = touch_event_features(evs)
    np.testing.assert_allclose(f.vx, [1e-6, 1e-6])
    np.testing.assert_allclose(f.ax, [0.0])


def test_straight_line_zero_curvature():
    evs = simple_stroke(0, 100, n=8)
    f = touch_event_features(evs)
    np.testing.assert_allclose(f.curvature, 0.0, atol=1e-12)


def test_direction_axes():
    right = [touch(0, TouchAction.DOWN, x=0, y=0), touch(10, TouchAction.UP, x=5, y=0)]
    up = [touch(0, TouchAction.DOWN, x=0, y=0), touch(10, TouchAction.UP, x=0, y=5)]
    assert touch_event_features(right).direction[0] == 0.0
    assert touch_event_features(up).direction[0] == pytest.approx(math.pi / 2)


def test_single_event_stroke_empty():
    f = touch_event_features([touch(0, TouchAction.DOWN)])
    for seq in (f.curvature, f.direction, f.vx, f.vy, f.ax, f.ay):
        assert seq.size == 0


def test_sequence_lengths():
    evs = simple_stroke(0, 100, n=6)
    f = touch_event_features(evs)
    assert f.vx.size == f.vy.size == 5
    assert f.direction.size == 5
    assert f.ax.size == f.ay.size == 4
    assert f.curvature.size == 4


def test_duplicate_timestamp_skipped():
    evs = [
        touch(0, TouchAction.DOWN, x=0),
        touch(10, TouchAction.MOVE, x=10),
        touch(10, TouchAction.MOVE, x=11),
        touch(20, TouchAction.UP, x=20),
    ]
    f = touch_event_features(evs)
    assert f.vx.size == 2  # three distinct timestamps
    assert np.all(np.isfinite(f.vx))


# ---------------------------------------------------------------------------
# touch round / stroke features
# ---------------------------------------------------------------------------

def stroked_of(events):
    return determine_strokes(correct_touch_actions(events))


def test_round_features_basic():
    events = simple_stroke(0, 100, n=5)
    t2 = touch_round_features(stroked_of(events))
    assert t2.records == 5
    assert t2.stroke_count == 1
    assert t2.max_pointers == 1
    assert t2.overall_time_ns == 100 * MS
    assert t2.overall_length_px == pytest.approx(4 * math.hypot(10, 5))
    assert t2.box_width == 40
    assert t2.box_height == 20
    assert t2.box_center_x == 20
    assert t2.box_center_y == 10
    assert t2.frequency == pytest.approx(5 / 0.1)


def test_point_stroke_zero_length_box():
    events = [
        touch(0, TouchAction.DOWN, x=33, y=44),
        touch(30, TouchAction.MOVE, x=33, y=44),
        touch(60, TouchAction.MOVE, x=33, y=44),
        touch(100, TouchAction.UP, x=33, y=44),
    ]
    t2 = touch_round_features(stroked_of(events))
    assert t2.records == 4
    assert t2.overall_length_px == 0.0
    assert (t2.box_width, t2.box_height) == (0.0, 0.0)
    assert (t2.box_center_x, t2.box_center_y) == (33.0, 44.0)


def test_overall_length_additive():
    events = simple_stroke(0, 100, n=5) + simple_stroke(150, 250, n=5)
    t2 = touch_round_features(stroked_of(events))
    assert t2.stroke_count == 2
    assert t2.overall_length_px == pytest.approx(2 * 4 * math.hypot(10, 5))
    assert t2.overall_time_ns == 200 * MS


def test_max_pointers_overlap():
    A = TouchAction
    events = [
        touch(0, A.DOWN, pointer_id=0, pointer_number=0),
        touch(5, A.MOVE, pointer_id=0, pointer_number=0),
        touch(5, A.POINTER_DOWN, pointer_id=1, pointer_number=1),
        touch(10, A.POINTER_UP, pointer_id=0, pointer_number=0),
        touch(10, A.MOVE, pointer_id=1, pointer_number=1),
        touch(20, A.UP, pointer_id=1, pointer_number=0),
    ]
    t2 = touch_round_features(stroked_of(events))
    assert t2.max_pointers == 2


def test_stroke_feature_record_shape():
    events = simple_stroke(0, 100, n=6)
    stroked = stroked_of(events)
    t2 = touch_round_features(stroked)
    ef = [touch_event_features([stroked.events[i] for i in s.events]) for s in stroked.strokes]
    t3 = touch_stroke_features(stroked, ef, t2, round_start_ns=0)
    assert len(t3) == 1
    rec = t3[0]
    assert len(rec) == len(STROKE_SEQ_FEATURES) * len(SEQ_STATS) + len(STROKE_SCALARS)
    assert len(rec) == 90 + 16
    assert rec["x.min"] == 0.0
    assert rec["x.max"] == 50.0
    assert rec["lengthNs"] == 100 * MS
    assert rec["startTimeNs"] == 0.0
    assert rec["endTimeNs"] == 100 * MS
    assert rec["pctLengthPx"] == pytest.approx(100.0)
    assert rec["pctLengthNs"] == pytest.approx(100.0)
    assert rec["sumLenX"] == 50.0
    assert rec["sumLenY"] == 25.0
    assert rec["x.stdev"] == pytest.approx(math.sqrt(rec["x.var"]))


# ---------------------------------------------------------------------------
# motion features
# ---------------------------------------------------------------------------

def test_motion_orders_linear_ramp():
    k = 2.5e-9  # per ns
    evs = [motion(t, Sensor.GYRO, (k * t * MS, 0, 0)) for t in range(0, 50, 10)]
    o0, o1, o2 = motion_orders(evs)
    np.testing.assert_allclose(o1[:, 0], k, rtol=1e-12)
    np.testing.assert_allclose(o2[:, 0], 0.0, atol=1e-24)
    assert o0.shape == (5, 3)
    assert o1.shape == (4, 3)
    assert o2.shape == (3, 3)


def test_motion_round_features_count_and_norms():
    f = motion_round_features([motion(0, Sensor.GYRO, (1, -2, 3))])
    assert len(f) == 90
    assert f["norm1.0"] == 3.0
    assert f["normInf.0"] == 6.0
    assert f["normF.0"] == pytest.approx(math.sqrt(14))
    assert f["l2sq.min.0"] == f["l2sq.max.0"] == f["l2sq.am.0"] == 14.0
    # no events at higher orders -> zeros
    assert f["normF.1"] == 0.0
    assert f["corr12.2"] == 0.0


def test_motion_zero_matrix():
    f = motion_round_features([motion(t, Sensor.GYRO, (0, 0, 0)) for t in (0, 10, 20)])
    for order in range(3):
        assert f[f"norm1.{order}"] == 0.0
        assert f[f"normF.{order}"] == 0.0


def test_motion_axis_correlation():
    evs = [motion(t, Sensor.GYRO, (t, 2 * t, -t)) for t in (0, 10, 20, 30)]
    f = motion_round_features(evs)
    assert f["corr12.0"] == pytest.approx(1.0)
    assert f["corr13.0"] == pytest.approx(-1.0)


def test_motion_stats_match_oracle():
    rng = np.random.default_rng(11)
    evs = [
        motion(t, Sensor.GYRO, tuple(rng.normal(size=3)))
        for t in range(0, 120, 10)
    ]
    f = motion_round_features(evs)
    mat = np.array([ev.v for ev in evs])
    for axis in range(3):
        expect = oracle_stats(mat[:, axis])
        for stat in MOTION_STATS:
            assert f[f"a{axis + 1}.0.{stat}"] == pytest.approx(expect[stat], rel=1e-12)


# ---------------------------------------------------------------------------
# fusion features
# ---------------------------------------------------------------------------

def fusion_event(t_ms, g, a):
    return FusionEvent(
        gesture_id="g", round=1, event_time_ns=int(t_ms * MS), gyro=g, accel=a
    )


def test_fusion_equal_vectors_zero_angle():
    evs = [fusion_event(t, (1.0, 2.0, 3.0), (1.0, 2.0, 3.0)) for t in (0, 10, 20)]
    f = motion_fusion_features(evs)
    np.testing.assert_allclose(f.sequences["angle.0"], 0.0, atol=1e-7)
    assert f.correlations["pcc11"] == 0.0  # constant sequences have no variance


def test_fusion_orthogonal_angle():
    evs = [fusion_event(t, (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)) for t in (0, 10, 20)]
    f = motion_fusion_features(evs)
    np.testing.assert_allclose(f.sequences["angle.0"], math.pi / 2)
    np.testing.assert_allclose(f.sequences["angleRate.0"], 0.0)


def test_fusion_feature_inventory():
    rng = np.random.default_rng(12)
    evs = [
        fusion_event(t, tuple(rng.normal(size=3)), tuple(rng.normal(size=3)))
        for t in range(0, 100, 10)
    ]
    f = motion_fusion_features(evs)
    assert set(f.sequences) == set(FUSION_SEQ_FEATURES)
    assert len(f.correlations) == 9
    for ang in f.sequences["angle.0"]:
        assert 0.0 <= ang <= math.pi
    for v in f.correlations.values():
        assert -1.0 <= v <= 1.0
    # PCC oracle
    g = np.array([ev.gyro for ev in evs])
    a = np.array([ev.accel for ev in evs])
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            expect = np.corrcoef(g[:, i - 1], a[:, j - 1])[0, 1]
            assert f.correlations[f"pcc{i}{j}"] == pytest.approx(expect, rel=1e-12)


def test_fusion_zero_norm_convention():
    evs = [fusion_event(t, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)) for t in (0, 10)]
    f = motion_fusion_features(evs)
    np.testing.assert_allclose(f.sequences["angle.0"], 0.0)
