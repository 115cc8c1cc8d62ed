"""Enrollment and verification orchestration."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .checks import (
    FaultEntry,
    Thresholds,
    WeightSet,
    attempt_indicators,
    build_catalog,
    compute_indicators,
    compute_thresholds,
    compute_weights,
    cross_validate,
)
from .config import SecurityParams, SmaugConfig
from .errors import CorruptRecord, EmptyRegistry, InsufficientRounds
from .pipeline import process_round
from .store import TemplateStore
from .template import GestureTemplate, generate_template
from .trace import GestureTrace, parse_trace, serialize_trace

RECORD_VERSION = 1


@dataclass
class EnrollmentRecord:
    user: str
    template: GestureTemplate
    weight_set: WeightSet
    thresholds: Thresholds
    traces: list[GestureTrace] = field(default_factory=list)
    enrollment_faults: list[FaultEntry] = field(default_factory=list)

    @property
    def gesture_id(self) -> str:
        return self.template.meta.gesture_id


@dataclass(frozen=True)
class AttemptResult:
    accepted: bool
    i_f: float
    i_w: float
    theta1: float
    theta2: float
    faults: tuple[FaultEntry, ...]


def enroll(user: str, traces: list[GestureTrace], cfg: SmaugConfig) -> EnrollmentRecord:
    """Build the template, individual weights, and thresholds from the
    enrollment rounds of one gesture."""
    if len(traces) != cfg.rounds:
        raise InsufficientRounds(f"expected {cfg.rounds} traces, got {len(traces)}")
    traces = sorted(traces, key=lambda t: t.meta.round)
    rounds = [process_round(trace, cfg) for trace in traces]
    template = generate_template(traces[0].meta, rounds, cfg)

    catalog = build_catalog(template, cfg)
    faults: list[FaultEntry] = []
    for rd in rounds:
        faults.extend(cross_validate(rd, template, cfg))
    n_strokes = len(template.t6)
    weights = compute_weights(faults, catalog, n_strokes, cfg)
    i_f, i_w = compute_indicators(faults, weights, cfg.rounds)
    weight_set = WeightSet(weights=weights, i_f=i_f, i_w=i_w, n_strokes=n_strokes)

    params = cfg.security_for(template.meta.background_image_mode, template.multi_touch)
    thresholds = compute_thresholds(weight_set, n_strokes, params)
    return EnrollmentRecord(
        user=user,
        template=template,
        weight_set=weight_set,
        thresholds=thresholds,
        traces=traces,
        enrollment_faults=faults,
    )


def verify_attempt(
    record: EnrollmentRecord, trace: GestureTrace, cfg: SmaugConfig
) -> AttemptResult:
    """Score one probe trace against the stored record."""
    rd = process_round(trace, cfg)
    faults = cross_validate(rd, record.template, cfg)
    i_f, i_w = attempt_indicators(faults, record.weight_set)
    th = record.thresholds
    accepted = i_w <= th.theta1 and i_f <= th.theta2
    return AttemptResult(
        accepted=accepted,
        i_f=i_f,
        i_w=i_w,
        theta1=th.theta1,
        theta2=th.theta2,
        faults=tuple(faults),
    )


@dataclass
class VerificationSession:
    """One login flow: a fixed attempt budget against one gesture record."""

    record: EnrollmentRecord
    cfg: SmaugConfig
    attempts: list[AttemptResult] = field(default_factory=list)
    status: str = "open"  # open | accepted | fallback

    @property
    def max_attempts(self) -> int:
        return self.cfg.retries + 1

    @property
    def fallback_required(self) -> bool:
        return self.status == "fallback"

    def submit(self, trace: GestureTrace) -> AttemptResult:
        if self.status != "open":
            raise RuntimeError(f"session is {self.status}")
        result = verify_attempt(self.record, trace, self.cfg)
        self.attempts.append(result)
        if result.accepted:
            self.status = "accepted"
        elif len(self.attempts) >= self.max_attempts:
            self.status = "fallback"
        return result


def select_gesture(
    store: TemplateStore, user: str, rng: random.Random | None = None
) -> str:
    """Pick the gesture the user must reproduce; uniform over the registry."""
    gestures = store.list_gestures(user)
    if not gestures:
        raise EmptyRegistry(f"user {user!r} has no enrolled gestures")
    rng = rng or random.Random()
    return rng.choice(gestures)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def record_to_payload(record: EnrollmentRecord) -> dict:
    """JSON-ready payload: the raw enrollment traces plus the derived
    weights and thresholds. Template tables are deterministic functions of
    the traces and are rebuilt on load."""
    ws = record.weight_set
    th = record.thresholds
    return {
        "version": RECORD_VERSION,
        "user": record.user,
        "gestureId": record.gesture_id,
        "rounds": [serialize_trace(t).decode("utf-8") for t in record.traces],
        "nStrokes": ws.n_strokes,
        "weights": [
            [feature, cmp, stroke, weight]
            for (feature, cmp, stroke), weight in sorted(ws.weights.items())
        ],
        "iF": ws.i_f,
        "iW": ws.i_w,
        "theta1": th.theta1,
        "theta2": th.theta2,
        "security": {
            "wMul": th.params.w_mul,
            "wAdd": th.params.w_add,
            "fMul": th.params.f_mul,
            "fAdd": th.params.f_add,
        },
    }


def record_from_payload(payload: dict, cfg: SmaugConfig) -> EnrollmentRecord:
    try:
        version = payload["version"]
        if version != RECORD_VERSION:
            raise CorruptRecord(f"record version {version!r}, expected {RECORD_VERSION}")
        user = payload["user"]
        traces = [parse_trace(doc) for doc in payload["rounds"]]
        traces.sort(key=lambda t: t.meta.round)
        rounds = [process_round(trace, cfg) for trace in traces]
        template = generate_template(traces[0].meta, rounds, cfg)
        weights = {
            (feature, cmp, int(stroke)): float(weight)
            for feature, cmp, stroke, weight in payload["weights"]
        }
        weight_set = WeightSet(
            weights=weights,
            i_f=float(payload["iF"]),
            i_w=float(payload["iW"]),
            n_strokes=int(payload["nStrokes"]),
        )
        sec = payload["security"]
        thresholds = Thresholds(
            theta1=float(payload["theta1"]),
            theta2=float(payload["theta2"]),
            params=SecurityParams(
                w_mul=float(sec["wMul"]),
                w_add=float(sec["wAdd"]),
                f_mul=float(sec["fMul"]),
                f_add=float(sec["fAdd"]),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptRecord(f"bad record payload: {exc}") from exc
    return EnrollmentRecord(
        user=user,
        template=template,
        weight_set=weight_set,
        thresholds=thresholds,
        traces=traces,
    )


def save_record(store: TemplateStore, record: EnrollmentRecord) -> str:
    return store.save(record.user, record.gesture_id, record_to_payload(record))


def load_record(
    store: TemplateStore, user: str, gesture_id: str, cfg: SmaugConfig
) -> EnrollmentRecord:
    return record_from_payload(store.load(user, gesture_id), cfg)
