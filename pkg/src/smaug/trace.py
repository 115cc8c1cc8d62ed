"""Raw capture data model and the line-delimited trace file format."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from urllib.parse import quote, unquote

from .errors import MalformedDocument, SchemaViolation

TRACE_HEADER = "#SMAUG-TRACE v1"


class TouchAction(Enum):
    DOWN = "DOWN"
    POINTER_DOWN = "PDOWN"
    MOVE = "MOVE"
    POINTER_UP = "PUP"
    UP = "UP"


DOWN_ACTIONS = (TouchAction.DOWN, TouchAction.POINTER_DOWN)
UP_ACTIONS = (TouchAction.UP, TouchAction.POINTER_UP)


class Sensor(Enum):
    GYRO = "GYRO"
    ACCEL = "ACCEL"


@dataclass(frozen=True)
class TouchEvent:
    gesture_id: str
    round: int
    event_time_ns: int
    pointer_id: int
    pointer_number: int
    action: TouchAction
    x: float
    y: float
    pressure: float
    size: float


@dataclass(frozen=True)
class MotionEvent:
    gesture_id: str
    round: int
    sensor: Sensor
    event_time_ns: int
    v: tuple[float, float, float]


@dataclass(frozen=True)
class GestureMeta:
    gesture_id: str
    name: str
    round: int
    secret_mode: bool = True
    background_image_mode: bool = False
    background_image_ref: str | None = None


@dataclass
class GestureTrace:
    meta: GestureMeta
    touch: list[TouchEvent] = field(default_factory=list)
    gyro: list[MotionEvent] = field(default_factory=list)
    accel: list[MotionEvent] = field(default_factory=list)


def format_real(x: float) -> str:
    """Canonical real formatting: 9 significant digits when that round-trips
    exactly, otherwise the shortest exact representation."""
    s = format(float(x), ".9g")
    if float(s) == float(x):
        return s
    return repr(float(x))


def _encode_text(s: str) -> str:
    return quote(s, safe="")


def _decode_text(s: str) -> str:
    return unquote(s)


def serialize_trace(trace: GestureTrace) -> bytes:
    """Deterministic canonical document; inverse of parse_trace."""
    m = trace.meta
    lines = [TRACE_HEADER]
    bg = _encode_text(m.background_image_ref) if m.background_image_ref else "-"
    lines.append(
        "META gestureId={gid} name={name} round={rnd} secret={sec} bgmode={bgm} bg={bg}".format(
            gid=_encode_text(m.gesture_id),
            name=_encode_text(m.name),
            rnd=m.round,
            sec=int(m.secret_mode),
            bgm=int(m.background_image_mode),
            bg=bg,
        )
    )
    for ev in sorted(trace.touch, key=lambda e: (e.event_time_ns, e.pointer_number)):
        lines.append(
            f"TOUCH {ev.event_time_ns} {ev.pointer_id} {ev.pointer_number} "
            f"{ev.action.value} {format_real(ev.x)} {format_real(ev.y)} "
            f"{format_real(ev.pressure)} {format_real(ev.size)}"
        )
    for section, events in (("GYRO", trace.gyro), ("ACCEL", trace.accel)):
        for ev in sorted(events, key=lambda e: e.event_time_ns):
            vals = " ".join(format_real(v) for v in ev.v)
            lines.append(f"{section} {ev.event_time_ns} {vals}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_trace(document: bytes | str) -> GestureTrace:
    """Parse a trace document, enforcing the type invariants.

    Input ordering is not required: streams are stably sorted by timestamp
    (touch additionally by pointer number).
    """
    if isinstance(document, bytes):
        try:
            text = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not valid UTF-8: {exc}") from exc
    else:
        text = document

    meta: GestureMeta | None = None
    touch: list[TouchEvent] = []
    gyro: list[MotionEvent] = []
    accel: list[MotionEvent] = []
    header_seen = False
    counts = {"TOUCH": 0, "GYRO": 0, "ACCEL": 0}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            if line == TRACE_HEADER:
                header_seen = True
            continue
        if not header_seen:
            raise MalformedDocument(f"line {lineno}: missing {TRACE_HEADER!r} header")
        parts = line.split(" ")
        tag = parts[0]
        if tag == "META":
            meta = _parse_meta(parts[1:], lineno)
        elif tag == "TOUCH":
            if meta is None:
                raise MalformedDocument(f"line {lineno}: TOUCH before META")
            touch.append(_parse_touch(parts[1:], meta, counts["TOUCH"], lineno))
            counts["TOUCH"] += 1
        elif tag in ("GYRO", "ACCEL"):
            if meta is None:
                raise MalformedDocument(f"line {lineno}: {tag} before META")
            ev = _parse_motion(parts[1:], tag, meta, counts[tag], lineno)
            (gyro if tag == "GYRO" else accel).append(ev)
            counts[tag] += 1
        else:
            raise MalformedDocument(f"line {lineno}: unknown record tag {tag!r}")

    if meta is None:
        raise MalformedDocument("missing META record")
    if not touch:
        raise SchemaViolation("touch", 0, "trace has no touch events")

    touch.sort(key=lambda e: (e.event_time_ns, e.pointer_number))
    gyro.sort(key=lambda e: e.event_time_ns)
    accel.sort(key=lambda e: e.event_time_ns)
    return GestureTrace(meta=meta, touch=touch, gyro=gyro, accel=accel)


def _parse_meta(fields: list[str], lineno: int) -> GestureMeta:
    kv = {}
    for item in fields:
        if "=" not in item:
            raise MalformedDocument(f"line {lineno}: bad META field {item!r}")
        key, _, value = item.partition("=")
        kv[key] = value
    required = ("gestureId", "name", "round", "secret", "bgmode", "bg")
    for key in required:
        if key not in kv:
            raise SchemaViolation(key, 0, "missing META field")
    try:
        rnd = int(kv["round"])
    except ValueError as exc:
        raise SchemaViolation("round", 0, str(exc)) from exc
    if rnd < 1:
        raise SchemaViolation("round", 0, f"round {rnd} < 1")
    if kv["secret"] not in ("0", "1") or kv["bgmode"] not in ("0", "1"):
        raise SchemaViolation("secret", 0, "flags must be 0 or 1")
    bg = None if kv["bg"] == "-" else _decode_text(kv["bg"])
    return GestureMeta(
        gesture_id=_decode_text(kv["gestureId"]),
        name=_decode_text(kv["name"]),
        round=rnd,
        secret_mode=kv["secret"] == "1",
        background_image_mode=kv["bgmode"] == "1",
        background_image_ref=bg,
    )


def _real(token: str, fieldname: str, record: int) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise SchemaViolation(fieldname, record, str(exc)) from exc
    if not math.isfinite(value):
        raise SchemaViolation(fieldname, record, "not finite")
    return value


def _parse_touch(fields: list[str], meta: GestureMeta, record: int, lineno: int) -> TouchEvent:
    if len(fields) != 8:
        raise MalformedDocument(f"line {lineno}: TOUCH needs 8 fields, got {len(fields)}")
    try:
        t_ns = int(fields[0])
        pid = int(fields[1])
        pnum = int(fields[2])
    except ValueError as exc:
        raise SchemaViolation("eventTimeNs", record, str(exc)) from exc
    if pid < 0:
        raise SchemaViolation("pointerId", record, f"{pid} < 0")
    if pnum < 0:
        raise SchemaViolation("pointerNumber", record, f"{pnum} < 0")
    try:
        action = TouchAction(fields[3])
    except ValueError as exc:
        raise SchemaViolation("action", record, fields[3]) from exc
    x = _real(fields[4], "x", record)
    y = _real(fields[5], "y", record)
    pressure = _real(fields[6], "pressure", record)
    size = _real(fields[7], "size", record)
    if x < 0:
        raise SchemaViolation("x", record, f"{x} < 0")
    if y < 0:
        raise SchemaViolation("y", record, f"{y} < 0")
    if not 0.0 <= pressure <= 2.0:
        raise SchemaViolation("pressure", record, f"{pressure} outside [0,2]")
    if not 0.0 <= size <= 1.0:
        raise SchemaViolation("size", record, f"{size} outside [0,1]")
    return TouchEvent(
        gesture_id=meta.gesture_id,
        round=meta.round,
        event_time_ns=t_ns,
        pointer_id=pid,
        pointer_number=pnum,
        action=action,
        x=x,
        y=y,
        pressure=pressure,
        size=size,
    )


def _parse_motion(fields: list[str], tag: str, meta: GestureMeta, record: int, lineno: int) -> MotionEvent:
    if len(fields) != 4:
        raise MalformedDocument(f"line {lineno}: {tag} needs 4 fields, got {len(fields)}")
    try:
        t_ns = int(fields[0])
    except ValueError as exc:
        raise SchemaViolation("eventTimeNs", record, str(exc)) from exc
    v = tuple(_real(fields[i], f"v{i}", record) for i in (1, 2, 3))
    return MotionEvent(
        gesture_id=meta.gesture_id,
        round=meta.round,
        sensor=Sensor[tag],
        event_time_ns=t_ns,
        v=v,  # type: ignore[arg-type]
    )


def group_event_sets(events: list[TouchEvent]) -> list[list[TouchEvent]]:
    """Partition a time-ordered touch stream into touch event sets.

    A set is a maximal run whose pointer numbers count up 0, 1, 2, ...;
    every set therefore starts at pointer number 0.
    """
    sets: list[list[TouchEvent]] = []
    for ev in events:
        if sets and ev.pointer_number == sets[-1][-1].pointer_number + 1:
            sets[-1].append(ev)
        else:
            sets.append([ev])
    return sets


def validate_trace(trace: GestureTrace) -> list[str]:
    """Return invariant violations as human-readable strings; [] when valid."""
    out: list[str] = []
    m = trace.meta
    if not trace.touch:
        out.append("touch non-empty")
    for name, stream in (("touch", trace.touch), ("gyro", trace.gyro), ("accel", trace.accel)):
        for i in range(1, len(stream)):
            if stream[i].event_time_ns < stream[i - 1].event_time_ns:
                out.append(f"{name} time order, index {i}")
        for i, ev in enumerate(stream):
            if ev.gesture_id != m.gesture_id:
                out.append(f"{name} gestureId mismatch, index {i}")
            if ev.round != m.round:
                out.append(f"{name} round mismatch, index {i}")
    for i, ev in enumerate(trace.touch):
        if not 0.0 <= ev.pressure <= 2.0:
            out.append(f"touch pressure range, index {i}")
        if not 0.0 <= ev.size <= 1.0:
            out.append(f"touch size range, index {i}")
        if ev.x < 0 or ev.y < 0:
            out.append(f"touch coordinate range, index {i}")
    for name, stream in (("gyro", trace.gyro), ("accel", trace.accel)):
        for i, ev in enumerate(stream):
            if len(ev.v) != 3 or not all(math.isfinite(c) for c in ev.v):
                out.append(f"{name} vector, index {i}")
    for si, es in enumerate(group_event_sets(trace.touch)):
        numbers = [ev.pointer_number for ev in es]
        if numbers != list(range(len(es))):
            out.append(f"touch event set {si} pointer numbers not 0..k-1")
    return out
