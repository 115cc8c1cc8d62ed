"""Per-round processing: raw trace -> corrected, stroked, feature-extracted data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SmaugConfig
from .errors import EmptyFusion, EmptyTouch
from .features import (
    FusionFeatures,
    TouchEventFeatures,
    TouchRoundFeatures,
    motion_fusion_features,
    motion_round_features,
    touch_event_features,
    touch_round_features,
    touch_stroke_features,
)
from .preprocess import (
    FusionEvent,
    StrokedTouchSet,
    correct_touch_actions,
    determine_strokes,
    fuse_motion,
    snuggle_motion,
)
from .trace import GestureTrace, MotionEvent


@dataclass
class RoundData:
    """Everything the template builders and checks need for one round."""

    round: int
    stroked: StrokedTouchSet
    event_features: list[TouchEventFeatures]
    t2: TouchRoundFeatures
    t3: list[dict[str, float]]
    round_start_ns: int
    gyro: list[MotionEvent]
    accel: list[MotionEvent]
    fusion: list[FusionEvent]
    g2: dict[str, float] | None
    a2: dict[str, float] | None
    fusion_features: FusionFeatures | None

    @property
    def has_motion(self) -> bool:
        return self.fusion_features is not None

    def stroke_sequence(self, stroke_index: int, feature: str) -> np.ndarray:
        """Comparison sequence for one stroke: x, y, or time relative to the
        round's first touch event."""
        stroke = self.stroked.strokes[stroke_index]
        events = [self.stroked.events[i] for i in stroke.events]
        if feature == "x":
            return np.array([ev.x for ev in events], dtype=np.float64)
        if feature == "y":
            return np.array([ev.y for ev in events], dtype=np.float64)
        if feature == "t":
            return np.array(
                [ev.event_time_ns - self.round_start_ns for ev in events],
                dtype=np.float64,
            )
        raise KeyError(feature)


def process_round(trace: GestureTrace, cfg: SmaugConfig) -> RoundData:
    """Run post-processing and feature extraction on one raw trace."""
    if not trace.touch:
        raise EmptyTouch("trace has no touch events")
    corrected = correct_touch_actions(trace.touch)
    stroked = determine_strokes(corrected)
    first_ns = corrected[0].event_time_ns
    last_ns = max(ev.event_time_ns for ev in corrected)

    gyro = snuggle_motion(trace.gyro, first_ns, last_ns, cfg.snuggle_before_ms, cfg.snuggle_after_ms)
    accel = snuggle_motion(trace.accel, first_ns, last_ns, cfg.snuggle_before_ms, cfg.snuggle_after_ms)

    fusion: list[FusionEvent] = []
    if gyro and accel:
        try:
            fusion = fuse_motion(gyro, accel, cfg.fusion_window_ms)
        except EmptyFusion:
            fusion = []

    event_features = [
        touch_event_features([stroked.events[i] for i in stroke.events])
        for stroke in stroked.strokes
    ]
    t2 = touch_round_features(stroked)
    t3 = touch_stroke_features(stroked, event_features, t2, first_ns)

    # Motion checks are only meaningful when the round has usable data on
    # both sensors and a non-empty fused stream.
    has_motion = bool(gyro) and bool(accel) and bool(fusion)
    g2 = motion_round_features(gyro) if has_motion else None
    a2 = motion_round_features(accel) if has_motion else None
    fus = motion_fusion_features(fusion) if has_motion else None

    return RoundData(
        round=trace.meta.round,
        stroked=stroked,
        event_features=event_features,
        t2=t2,
        t3=t3,
        round_start_ns=first_ns,
        gyro=gyro,
        accel=accel,
        fusion=fusion,
        g2=g2,
        a2=a2,
        fusion_features=fus,
    )
