import numpy as np
import pytest

from smaug.config import default_config
from smaug.trace import GestureMeta, MotionEvent, Sensor, TouchAction, TouchEvent

MS = 1_000_000  # ns per millisecond


def touch(
    t_ms: float,
    action: TouchAction,
    x: float = 100.0,
    y: float = 100.0,
    pointer_id: int = 0,
    pointer_number: int = 0,
    pressure: float = 1.0,
    size: float = 0.1,
    gesture_id: str = "g",
    round_: int = 1,
) -> TouchEvent:
    return TouchEvent(
        gesture_id=gesture_id,
        round=round_,
        event_time_ns=int(t_ms * MS),
        pointer_id=pointer_id,
        pointer_number=pointer_number,
        action=action,
        x=x,
        y=y,
        pressure=pressure,
        size=size,
    )


def motion(
    t_ms: float,
    sensor: Sensor = Sensor.GYRO,
    v=(0.0, 0.0, 0.0),
    gesture_id: str = "g",
    round_: int = 1,
) -> MotionEvent:
    return MotionEvent(
        gesture_id=gesture_id,
        round=round_,
        sensor=sensor,
        event_time_ns=int(t_ms * MS),
        v=tuple(float(c) for c in v),
    )


def simple_stroke(start_ms: float, end_ms: float, n: int = 5, **kw):
    """A straight single-pointer stroke with n events."""
    times = np.linspace(start_ms, end_ms, n)
    events = [touch(times[0], TouchAction.DOWN, x=0.0, y=0.0, **kw)]
    for i, t in enumerate(times[1:-1], start=1):
        events.append(touch(t, TouchAction.MOVE, x=10.0 * i, y=5.0 * i, **kw))
    events.append(touch(times[-1], TouchAction.UP, x=10.0 * (n - 1), y=5.0 * (n - 1), **kw))
    return events


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def meta():
    return GestureMeta(gesture_id="g", name="demo", round=1)
