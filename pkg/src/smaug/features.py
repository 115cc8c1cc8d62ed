"""Feature extraction: per-event touch features, round features, stroke
statistics, motion differentiation, motion round features, fusion features."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .preprocess import FusionEvent, StrokedTouchSet
from .trace import DOWN_ACTIONS, UP_ACTIONS, MotionEvent, TouchEvent

# Per-stroke statistic feature names (paper-independent identifiers).
STROKE_SEQ_FEATURES = ("x", "y", "p", "s", "c", "d", "vx", "vy", "ax", "ay")
SEQ_STATS = ("min", "max", "am", "rms", "var", "stdev", "mad", "skew", "kurt")
STROKE_SCALARS = (
    "lengthNs",
    "lengthPx",
    "startX",
    "startY",
    "endX",
    "endY",
    "startTimeNs",
    "endTimeNs",
    "sumLenX",
    "sumLenY",
    "boxWidth",
    "boxHeight",
    "boxCenterX",
    "boxCenterY",
    "pctLengthPx",
    "pctLengthNs",
)
MOTION_STATS = ("am", "rms", "var", "stdev", "mad", "skew", "kurt")
GESTURE_CHECK_FEATURES = (
    "records",
    "overallLengthPx",
    "overallTimeNs",
    "boxCenterX",
    "boxCenterY",
    "boxWidth",
    "boxHeight",
)
FUSION_SEQ_FEATURES = (
    "angle.0",
    "angleRate.0",
    "angle.1",
    "angleRate.1",
    "angle.2",
    "angleRate.2",
)
DTW_TOUCH_FEATURES = ("x", "y", "t")

_EPS_NORM = 1e-12


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def am(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0
    return float(values.mean())


def rms(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0
    return float(math.sqrt(np.mean(values * values)))


def var(values) -> float:
    """Sample variance with n-1 normalization; 0 for n < 2."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return 0.0
    return float(values.var(ddof=1))


def stdev(values) -> float:
    return math.sqrt(var(values))


def mad(values) -> float:
    """Square root of the n-1 normalized mean absolute deviation."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return 0.0
    inner = np.abs(values - values.mean()).sum() / (values.size - 1)
    return float(math.sqrt(inner))


def skew(values) -> float:
    """Third standardized moment with n-1 normalization; 0 for constant input."""
    values = np.asarray(values, dtype=np.float64)
    sd = stdev(values)
    if values.size < 2 or sd == 0.0:
        return 0.0
    z = (values - values.mean()) / sd
    return float(np.sum(z**3) / (values.size - 1))


def kurt(values) -> float:
    """Fourth standardized moment with n-1 normalization; 0 for constant input."""
    values = np.asarray(values, dtype=np.float64)
    sd = stdev(values)
    if values.size < 2 or sd == 0.0:
        return 0.0
    z = (values - values.mean()) / sd
    return float(np.sum(z**4) / (values.size - 1))


def median(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0
    return float(np.median(values))


def pearson(a, b) -> float:
    """Pearson correlation; 0 when either side has zero variance."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size != b.size or a.size < 2:
        return 0.0
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(np.sum(da * da)) * float(np.sum(db * db)))
    if denom == 0.0:
        return 0.0
    return float(np.sum(da * db) / denom)


_STAT_FNS = {
    "min": lambda v: float(np.min(v)) if len(v) else 0.0,
    "max": lambda v: float(np.max(v)) if len(v) else 0.0,
    "am": am,
    "rms": rms,
    "var": var,
    "stdev": stdev,
    "mad": mad,
    "skew": skew,
    "kurt": kurt,
}


def seq_stats(values, stats=SEQ_STATS) -> dict[str, float]:
    values = np.asarray(values, dtype=np.float64)
    return {name: _STAT_FNS[name](values) for name in stats}


# ---------------------------------------------------------------------------
# touch event features
# ---------------------------------------------------------------------------

@dataclass
class TouchEventFeatures:
    """Derived per-event sequences of one stroke.

    Difference quotients skip events that repeat the previous timestamp, so
    sequence lengths refer to the deduplicated event count n: velocity n-1,
    acceleration n-2, direction n-1, curvature n-2.
    """

    curvature: np.ndarray
    direction: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    ax: np.ndarray
    ay: np.ndarray


def touch_event_features(stroke_events: list[TouchEvent]) -> TouchEventFeatures:
    # collapse duplicate timestamps (keep first) for derivative chains
    dedup: list[TouchEvent] = []
    for ev in stroke_events:
        if dedup and ev.event_time_ns == dedup[-1].event_time_ns:
            continue
        dedup.append(ev)
    xs = np.array([ev.x for ev in dedup], dtype=np.float64)
    ys = np.array([ev.y for ev in dedup], dtype=np.float64)
    ts = np.array([ev.event_time_ns for ev in dedup], dtype=np.float64)
    n = len(dedup)
    empty = np.empty(0, dtype=np.float64)

    if n < 2:
        return TouchEventFeatures(empty, empty, empty, empty, empty, empty)

    dt = np.diff(ts)
    vx = np.diff(xs) / dt
    vy = np.diff(ys) / dt
    direction = np.arctan2(np.diff(ys), np.diff(xs))

    if n < 3:
        return TouchEventFeatures(empty, direction, vx, vy, empty, empty)

    ax = np.diff(vx) / dt[1:]
    ay = np.diff(vy) / dt[1:]

    # central differences on interior points
    phi_x = xs[2:] - 2.0 * xs[1:-1] + xs[:-2]
    phi_y = ys[2:] - 2.0 * ys[1:-1] + ys[:-2]
    theta_x = 0.5 * (xs[2:] - xs[:-2])
    theta_y = 0.5 * (ys[2:] - ys[:-2])
    denom = (theta_x**2 + theta_y**2) ** 1.5
    num = 4.0 * phi_y * theta_x - 4.0 * phi_x * theta_y
    curvature = np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), 0.0)

    return TouchEventFeatures(curvature, direction, vx, vy, ax, ay)


# ---------------------------------------------------------------------------
# touch round features (T2)
# ---------------------------------------------------------------------------

@dataclass
class TouchRoundFeatures:
    records: int
    frequency: float
    max_pointers: int
    overall_length_px: float
    overall_time_ns: float
    stroke_count: int
    box_center_x: float
    box_center_y: float
    box_width: float
    box_height: float

    def check_values(self) -> dict[str, float]:
        return {
            "records": float(self.records),
            "overallLengthPx": self.overall_length_px,
            "overallTimeNs": self.overall_time_ns,
            "boxCenterX": self.box_center_x,
            "boxCenterY": self.box_center_y,
            "boxWidth": self.box_width,
            "boxHeight": self.box_height,
        }


def _polyline_length(events: list[TouchEvent]) -> float:
    xs = np.array([ev.x for ev in events])
    ys = np.array([ev.y for ev in events])
    if xs.size < 2:
        return 0.0
    return float(np.sum(np.hypot(np.diff(xs), np.diff(ys))))


def max_simultaneous_pointers(events: list[TouchEvent]) -> int:
    active: set[int] = set()
    best = 0
    for ev in events:
        if ev.action in DOWN_ACTIONS:
            active.add(ev.pointer_id)
            best = max(best, len(active))
        elif ev.action in UP_ACTIONS:
            active.discard(ev.pointer_id)
    return best


def touch_round_features(stroked: StrokedTouchSet) -> TouchRoundFeatures:
    events = stroked.events
    xs = np.array([ev.x for ev in events])
    ys = np.array([ev.y for ev in events])
    overall_time = 0.0
    overall_len = 0.0
    for stroke in stroked.strokes:
        sev = [events[i] for i in stroke.events]
        overall_time += sev[-1].event_time_ns - sev[0].event_time_ns
        overall_len += _polyline_length(sev)
    freq = len(events) / (overall_time * 1e-9) if overall_time > 0 else 0.0
    return TouchRoundFeatures(
        records=len(events),
        frequency=freq,
        max_pointers=max_simultaneous_pointers(events),
        overall_length_px=overall_len,
        overall_time_ns=overall_time,
        stroke_count=len(stroked.strokes),
        box_center_x=float((xs.min() + xs.max()) / 2.0),
        box_center_y=float((ys.min() + ys.max()) / 2.0),
        box_width=float(xs.max() - xs.min()),
        box_height=float(ys.max() - ys.min()),
    )


# ---------------------------------------------------------------------------
# touch stroke features (T3)
# ---------------------------------------------------------------------------

def touch_stroke_features(
    stroked: StrokedTouchSet,
    event_features: list[TouchEventFeatures],
    round_features: TouchRoundFeatures,
    round_start_ns: int,
) -> list[dict[str, float]]:
    """Per-stroke statistics over the ten sequences plus scalar stroke
    features. Start/end times are relative to the round's first touch so
    templates are comparable across rounds."""
    out: list[dict[str, float]] = []
    for stroke, feats in zip(stroked.strokes, event_features):
        sev = [stroked.events[i] for i in stroke.events]
        xs = np.array([ev.x for ev in sev])
        ys = np.array([ev.y for ev in sev])
        seqs = {
            "x": xs,
            "y": ys,
            "p": np.array([ev.pressure for ev in sev]),
            "s": np.array([ev.size for ev in sev]),
            "c": feats.curvature,
            "d": feats.direction,
            "vx": feats.vx,
            "vy": feats.vy,
            "ax": feats.ax,
            "ay": feats.ay,
        }
        rec: dict[str, float] = {}
        for name in STROKE_SEQ_FEATURES:
            for stat, value in seq_stats(seqs[name]).items():
                rec[f"{name}.{stat}"] = value

        length_ns = float(sev[-1].event_time_ns - sev[0].event_time_ns)
        length_px = _polyline_length(sev)
        rec["lengthNs"] = length_ns
        rec["lengthPx"] = length_px
        rec["startX"] = float(sev[0].x)
        rec["startY"] = float(sev[0].y)
        rec["endX"] = float(sev[-1].x)
        rec["endY"] = float(sev[-1].y)
        rec["startTimeNs"] = float(sev[0].event_time_ns - round_start_ns)
        rec["endTimeNs"] = float(sev[-1].event_time_ns - round_start_ns)
        rec["sumLenX"] = float(np.sum(np.abs(np.diff(xs)))) if xs.size > 1 else 0.0
        rec["sumLenY"] = float(np.sum(np.abs(np.diff(ys)))) if ys.size > 1 else 0.0
        rec["boxWidth"] = float(xs.max() - xs.min())
        rec["boxHeight"] = float(ys.max() - ys.min())
        rec["boxCenterX"] = float((xs.min() + xs.max()) / 2.0)
        rec["boxCenterY"] = float((ys.min() + ys.max()) / 2.0)
        rec["pctLengthPx"] = (
            100.0 * length_px / round_features.overall_length_px
            if round_features.overall_length_px > 0
            else 0.0
        )
        rec["pctLengthNs"] = (
            100.0 * length_ns / round_features.overall_time_ns
            if round_features.overall_time_ns > 0
            else 0.0
        )
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# motion features
# ---------------------------------------------------------------------------

def _diff_orders(values: np.ndarray, times: np.ndarray) -> list[np.ndarray]:
    """Value matrix (n x 3) -> [order0, order1, order2] difference quotients."""
    orders = [values]
    cur, t = values, times
    for _ in range(2):
        if cur.shape[0] < 2:
            cur = np.empty((0, values.shape[1]))
            t = np.empty(0)
        else:
            dt = np.diff(t)[:, None]
            cur = np.diff(cur, axis=0) / dt
            t = t[1:]
        orders.append(cur)
    return orders


def motion_orders(events: list[MotionEvent]) -> list[np.ndarray]:
    values = np.array([ev.v for ev in events], dtype=np.float64).reshape(-1, 3)
    times = np.array([ev.event_time_ns for ev in events], dtype=np.float64)
    return _diff_orders(values, times)


def motion_round_features(events: list[MotionEvent]) -> dict[str, float]:
    """The 90-value feature record of one motion sensor for one round."""
    return _motion_matrix_features(motion_orders(events))


def _motion_matrix_features(orders: list[np.ndarray]) -> dict[str, float]:
    out: dict[str, float] = {}
    for order, mat in enumerate(orders):
        for axis in range(3):
            col = mat[:, axis] if mat.size else np.empty(0)
            for stat in MOTION_STATS:
                out[f"a{axis + 1}.{order}.{stat}"] = _STAT_FNS[stat](col)
        for i, j in ((1, 2), (1, 3), (2, 3)):
            if mat.size:
                out[f"corr{i}{j}.{order}"] = pearson(mat[:, i - 1], mat[:, j - 1])
            else:
                out[f"corr{i}{j}.{order}"] = 0.0
        if mat.size:
            out[f"norm1.{order}"] = float(np.abs(mat).sum(axis=0).max())
            out[f"normInf.{order}"] = float(np.abs(mat).sum(axis=1).max())
            out[f"normF.{order}"] = float(math.sqrt((mat**2).sum()))
            l2sq = (mat**2).sum(axis=1)
            out[f"l2sq.min.{order}"] = float(l2sq.min())
            out[f"l2sq.max.{order}"] = float(l2sq.max())
            out[f"l2sq.am.{order}"] = float(l2sq.mean())
        else:
            for key in ("norm1", "normInf", "normF", "l2sq.min", "l2sq.max", "l2sq.am"):
                out[f"{key}.{order}"] = 0.0
    return out


# ---------------------------------------------------------------------------
# fusion features
# ---------------------------------------------------------------------------

@dataclass
class FusionFeatures:
    """Per-event angle sequences (with rates of change) and the 3x3 axis
    correlation record of the fused motion stream."""

    sequences: dict[str, np.ndarray]
    correlations: dict[str, float]


def _angles(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    if g.shape[0] == 0:
        return np.empty(0)
    ng = np.linalg.norm(g, axis=1)
    na = np.linalg.norm(a, axis=1)
    dots = np.sum(g * a, axis=1)
    denom = ng * na
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(denom > _EPS_NORM, dots / np.where(denom > 0, denom, 1.0), 1.0)
    return np.arccos(np.clip(cos, -1.0, 1.0))


def motion_fusion_features(fusion: list[FusionEvent]) -> FusionFeatures:
    g = np.array([ev.gyro for ev in fusion], dtype=np.float64).reshape(-1, 3)
    a = np.array([ev.accel for ev in fusion], dtype=np.float64).reshape(-1, 3)
    t = np.array([ev.event_time_ns for ev in fusion], dtype=np.float64)
    g_orders = _diff_orders(g, t)
    a_orders = _diff_orders(a, t)
    times = [t, t[1:] if t.size > 1 else np.empty(0), t[2:] if t.size > 2 else np.empty(0)]

    sequences: dict[str, np.ndarray] = {}
    for order in range(3):
        ang = _angles(g_orders[order], a_orders[order])
        sequences[f"angle.{order}"] = ang
        to = times[order]
        if ang.size > 1:
            sequences[f"angleRate.{order}"] = np.diff(ang) / np.diff(to)
        else:
            sequences[f"angleRate.{order}"] = np.empty(0)

    correlations = {
        f"pcc{i}{j}": pearson(g[:, i - 1], a[:, j - 1])
        for i in (1, 2, 3)
        for j in (1, 2, 3)
    }
    return FusionFeatures(sequences=sequences, correlations=correlations)
