"""Touch action correction, stroke determination, snuggling, motion fusion."""
from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import EmptyFusion, InconsistentStream, UnterminatedStroke
from .trace import (
    DOWN_ACTIONS,
    UP_ACTIONS,
    MotionEvent,
    TouchAction,
    TouchEvent,
    group_event_sets,
)

NS_PER_MS = 1_000_000


@dataclass(frozen=True)
class Stroke:
    stroke_index: int
    pointer_id: int
    events: tuple[int, ...]  # indices into the corrected touch stream


@dataclass
class StrokedTouchSet:
    events: list[TouchEvent]
    strokes: list[Stroke]
    stroke_gap_spans: list[tuple[int, int]]


@dataclass(frozen=True)
class FusionEvent:
    gesture_id: str
    round: int
    event_time_ns: int
    gyro: tuple[float, float, float]
    accel: tuple[float, float, float]


def correct_touch_actions(events: list[TouchEvent]) -> list[TouchEvent]:
    """Rewrite spurious POINTER_UP actions to MOVE.

    Within each touch event set, a pointer keeps its POINTER_UP only if it
    has no event in any later event set; the others were merely reported
    alongside the leaving pointer and are rewritten to MOVE.
    """
    sets = group_event_sets(events)
    # last event-set index in which each pointer id appears
    last_seen: dict[int, int] = {}
    for si, es in enumerate(sets):
        for ev in es:
            last_seen[ev.pointer_id] = si

    corrected: list[TouchEvent] = []
    for si, es in enumerate(sets):
        for ev in es:
            if ev.action is TouchAction.POINTER_UP and last_seen[ev.pointer_id] > si:
                ev = replace(ev, action=TouchAction.MOVE)
            corrected.append(ev)

    _check_consistency(corrected)
    return corrected


def _check_consistency(events: list[TouchEvent]) -> None:
    ended: set[int] = set()
    active: set[int] = set()
    for i, ev in enumerate(events):
        pid = ev.pointer_id
        if ev.action in DOWN_ACTIONS:
            ended.discard(pid)
            active.add(pid)
        elif pid in ended:
            raise InconsistentStream(
                f"pointer {pid} reappears at index {i} after its up event"
            )
        if ev.action in UP_ACTIONS:
            if pid in active:
                active.discard(pid)
                ended.add(pid)


def determine_strokes(corrected: list[TouchEvent]) -> StrokedTouchSet:
    """Partition corrected events into strokes and locate stroke gaps."""
    open_strokes: dict[int, list[int]] = {}
    finished: list[tuple[int, int, list[int]]] = []  # (down time, pointer id, indices)
    for i, ev in enumerate(corrected):
        pid = ev.pointer_id
        if ev.action in DOWN_ACTIONS:
            if pid in open_strokes:
                raise InconsistentStream(f"pointer {pid} down while already active")
            open_strokes[pid] = [i]
        else:
            if pid not in open_strokes:
                raise InconsistentStream(f"pointer {pid} event without a down")
            open_strokes[pid].append(i)
            if ev.action in UP_ACTIONS:
                idxs = open_strokes.pop(pid)
                finished.append((corrected[idxs[0]].event_time_ns, pid, idxs))
    if open_strokes:
        pid = sorted(open_strokes)[0]
        raise UnterminatedStroke(f"pointer {pid} has no up event")

    finished.sort(key=lambda item: (item[0], item[1]))
    strokes = [
        Stroke(stroke_index=k, pointer_id=pid, events=tuple(idxs))
        for k, (_, pid, idxs) in enumerate(finished)
    ]

    gaps: list[tuple[int, int]] = []
    if strokes:
        intervals = sorted(
            (corrected[s.events[0]].event_time_ns, corrected[s.events[-1]].event_time_ns)
            for s in strokes
        )
        covered_end = intervals[0][1]
        for start, end in intervals[1:]:
            if start > covered_end:
                gaps.append((covered_end, start))
            covered_end = max(covered_end, end)
    return StrokedTouchSet(events=list(corrected), strokes=strokes, stroke_gap_spans=gaps)


def snuggle_motion(
    motion: list[MotionEvent],
    first_touch_ns: int,
    last_touch_ns: int,
    before_ms: float,
    after_ms: float,
) -> list[MotionEvent]:
    """Keep motion events inside the closed window around the touch activity."""
    if first_touch_ns > last_touch_ns:
        raise ValueError("first_touch_ns must not exceed last_touch_ns")
    lo = first_touch_ns - int(before_ms * NS_PER_MS)
    hi = last_touch_ns + int(after_ms * NS_PER_MS)
    return [ev for ev in motion if lo <= ev.event_time_ns <= hi]


def fuse_motion(
    gyro: list[MotionEvent],
    accel: list[MotionEvent],
    window_ms: float = 10.0,
) -> list[FusionEvent]:
    """Pair gyro and accelerometer events into one synchronous stream.

    Greedy forward scan: each gyro event takes the nearest not-yet-used
    accelerometer event if it lies within the pairing window; everything
    unmatched on either side is dropped. Fusion timestamps come from the
    gyro events and are strictly increasing.
    """
    window_ns = window_ms * NS_PER_MS
    fused: list[FusionEvent] = []
    j = 0
    last_t = None
    for g in gyro:
        while j + 1 < len(accel) and abs(accel[j + 1].event_time_ns - g.event_time_ns) <= abs(
            accel[j].event_time_ns - g.event_time_ns
        ):
            j += 1
        if j >= len(accel):
            break
        a = accel[j]
        if abs(a.event_time_ns - g.event_time_ns) > window_ns:
            continue
        if last_t is not None and g.event_time_ns <= last_t:
            continue
        fused.append(
            FusionEvent(
                gesture_id=g.gesture_id,
                round=g.round,
                event_time_ns=g.event_time_ns,
                gyro=g.v,
                accel=a.v,
            )
        )
        last_t = g.event_time_ns
        j += 1
        if j >= len(accel):
            break
    if not fused:
        raise EmptyFusion("no gyro/accelerometer pairs within the window")
    return fused
