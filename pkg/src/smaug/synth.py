"""Synthetic trace generation and desk-scale TPR/FPR experiments."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .authflow import AttemptResult, VerificationSession, enroll
from .config import SmaugConfig
from .trace import GestureMeta, GestureTrace, MotionEvent, Sensor, TouchAction, TouchEvent

BASE_TIME_NS = 12_000_000_000
NS_PER_MS = 1_000_000


@dataclass(frozen=True)
class StrokeSpec:
    """One stroke of a shape: a unit-square polyline drawn at constant speed
    over a fraction [t0, t1] of the gesture duration by one pointer slot."""

    points: tuple[tuple[float, float], ...]
    t0: float
    t1: float
    slot: int = 0


@dataclass(frozen=True)
class GestureShape:
    name: str
    strokes: tuple[StrokeSpec, ...]

    def __post_init__(self):
        if not self.strokes:
            raise ValueError("shape needs at least one stroke")
        for st in self.strokes:
            if not st.t1 > st.t0:
                raise ValueError("stroke duration must be positive")


SHAPES: dict[str, GestureShape] = {
    "A": GestureShape(
        "A",
        (
            StrokeSpec(((0.15, 0.85), (0.5, 0.1)), 0.00, 0.30),
            StrokeSpec(((0.5, 0.1), (0.85, 0.85)), 0.36, 0.62),
            StrokeSpec(((0.3, 0.55), (0.7, 0.55)), 0.70, 0.95),
        ),
    ),
    "bar": GestureShape(
        "bar",
        (
            StrokeSpec(((0.35, 0.2), (0.35, 0.8)), 0.00, 0.90, slot=0),
            StrokeSpec(((0.65, 0.2), (0.65, 0.8)), 0.06, 0.96, slot=1),
        ),
    ),
    "square": GestureShape(
        "square",
        (
            StrokeSpec(
                ((0.2, 0.2), (0.8, 0.2), (0.8, 0.8), (0.2, 0.8), (0.2, 0.2)),
                0.00,
                0.95,
            ),
        ),
    ),
    "I": GestureShape(
        "I",
        (
            StrokeSpec(((0.3, 0.15), (0.7, 0.15)), 0.00, 0.26),
            StrokeSpec(((0.5, 0.15), (0.5, 0.85)), 0.32, 0.62),
            StrokeSpec(((0.3, 0.85), (0.7, 0.85)), 0.68, 0.95),
        ),
    ),
    "star": GestureShape(
        "star",
        (
            StrokeSpec(((0.5, 0.05), (0.79, 0.95)), 0.00, 0.16),
            StrokeSpec(((0.79, 0.95), (0.05, 0.38)), 0.20, 0.36),
            StrokeSpec(((0.05, 0.38), (0.95, 0.38)), 0.40, 0.56),
            StrokeSpec(((0.95, 0.38), (0.21, 0.95)), 0.60, 0.76),
            StrokeSpec(((0.21, 0.95), (0.5, 0.05)), 0.80, 0.96),
        ),
    ),
}


@dataclass(frozen=True)
class UserProfile:
    """Parametric stand-in for one person's reproduction noise."""

    seed: int
    sigma_xy: float = 3.0          # control-point jitter, px
    tremor_px: float = 0.15        # per-event jitter, px
    sigma_t_ms: float = 8.0        # stroke start/end jitter
    sigma_pressure: float = 0.008  # per-event pressure noise
    pressure_level_jitter: float = 0.03   # per-round pressure level factor
    sigma_size: float = 0.004
    size_level_jitter: float = 0.02
    sigma_motion: float = 0.02     # OU noise scale relative to amplitude
    motion_amp_jitter: float = 0.04       # per-round amplitude factor
    motion_freq_jitter: float = 0.02      # per-round frequency factor
    tempo: float = 1.0             # overall duration multiplier
    tempo_jitter: float = 0.03     # log-normal sigma per round
    drift_xy: float = 1.5          # per-round whole-gesture offset, px
    learning: float = 1.8          # jitter multiplier for the first two rounds
    scale_px: float = 600.0
    origin: tuple[float, float] = (180.0, 260.0)
    duration_ms: float = 1400.0
    pressure_base: float = 0.9
    size_base: float = 0.12
    gyro_amp: float = 0.8
    accel_amp: float = 1.5
    motion_freq_hz: float = 1.7


@dataclass(frozen=True)
class ImpostorProfile:
    """Shape-faithful attacker whose fine dynamics diverge from the victim."""

    victim: UserProfile
    seed: int
    divergence: float = 1.0        # > 0; scales every dynamics deviation
    tempo_factor: float = 1.30
    pressure_shift: float = 0.25
    size_shift: float = 0.05
    sigma_scale: float = 2.5
    motion_amp_factor: float = 2.0
    motion_freq_factor: float = 1.6

    def __post_init__(self):
        if not self.divergence > 0:
            raise ValueError("dynamics divergence must be positive")

    def effective(self) -> UserProfile:
        """The profile the attacker actually draws with: victim geometry,
        diverging dynamics."""
        v = self.victim
        d = self.divergence

        def mix(factor: float) -> float:
            return 1.0 + (factor - 1.0) * d

        return replace(
            v,
            seed=self.seed,
            tempo=v.tempo * mix(self.tempo_factor),
            pressure_base=v.pressure_base + self.pressure_shift * d,
            size_base=v.size_base + self.size_shift * d,
            sigma_xy=v.sigma_xy * mix(self.sigma_scale),
            tremor_px=v.tremor_px * mix(self.sigma_scale),
            gyro_amp=v.gyro_amp * mix(self.motion_amp_factor),
            accel_amp=v.accel_amp * mix(self.motion_amp_factor),
            motion_freq_hz=v.motion_freq_hz * mix(self.motion_freq_factor),
        )


def _polyline_point(points: np.ndarray, u: float) -> tuple[float, float]:
    seg = np.diff(points, axis=0)
    lens = np.hypot(seg[:, 0], seg[:, 1])
    total = lens.sum()
    if total == 0:
        return float(points[0, 0]), float(points[0, 1])
    cum = np.concatenate(([0.0], np.cumsum(lens)))
    target = u * total
    x = float(np.interp(target, cum, points[:, 0]))
    y = float(np.interp(target, cum, points[:, 1]))
    return x, y


_GYRO_PHASES = (0.0, 2.1, 4.2)
_ACCEL_PHASES = (1.0, 3.1, 5.2)
_ACCEL_OFFSET = (0.1, 0.2, 9.8)


def gen_trace(
    shape: GestureShape,
    profile: UserProfile,
    round_: int,
    touch_hz: float = 60.0,
    motion_hz: float = 200.0,
    gesture_id: str | None = None,
    secret_mode: bool = True,
    background_image_mode: bool = False,
) -> GestureTrace:
    """One deterministic synthetic round. All randomness comes from
    (profile.seed, round); zero-jitter profiles produce round-independent
    events."""
    rng = np.random.default_rng(np.random.SeedSequence(profile.seed, spawn_key=(round_,)))
    dt_ms = 1000.0 / touch_hz

    # The first rounds of an enrollment are sloppier: the user is still
    # practicing the gesture. Probe rounds always use the settled jitter.
    settle = profile.learning if round_ <= 2 else 1.0

    # Jitter is uniform (bounded) rather than Gaussian: round-to-round human
    # variation has compact support, and the min/max-based template bounds
    # reject heavy-tailed noise far too often.
    def jitter(scale: float, size=None):
        half = math.sqrt(3.0) * scale * settle
        return rng.uniform(-half, half, size)

    tempo_factor = math.exp(jitter(profile.tempo_jitter))
    duration = profile.duration_ms * profile.tempo * tempo_factor
    drift = jitter(profile.drift_xy, 2)

    # per-round stroke geometry and timing
    strokes = []
    for st in shape.strokes:
        pts = np.array(st.points, dtype=np.float64)
        pts = pts * profile.scale_px + np.array(profile.origin) + drift
        pts += jitter(profile.sigma_xy, pts.shape)
        s_ms = st.t0 * duration + jitter(profile.sigma_t_ms)
        e_ms = st.t1 * duration + jitter(profile.sigma_t_ms)
        s_ms = max(s_ms, 0.0)
        e_ms = max(e_ms, s_ms + 4.0 * dt_ms)
        first = math.ceil(s_ms / dt_ms)
        last = math.floor(e_ms / dt_ms)
        if last - first < 2:
            last = first + 2
        strokes.append((st.slot, pts, first, last))

    # per-round shared latent levels; most derived statistics move together
    # with these, like a person pressing a little harder on some days
    pressure_level = profile.pressure_base * (1.0 + jitter(profile.pressure_level_jitter))
    size_level = profile.size_base * (1.0 + jitter(profile.size_level_jitter))
    gyro_amp = profile.gyro_amp * (1.0 + jitter(profile.motion_amp_jitter))
    accel_amp = profile.accel_amp * (1.0 + jitter(profile.motion_amp_jitter))
    freq = profile.motion_freq_hz * (1.0 + jitter(profile.motion_freq_jitter))

    # touch events on the shared frame grid
    by_frame: dict[int, list[tuple[int, int]]] = {}
    for si, (slot, _, first, last) in enumerate(strokes):
        for f in range(first, last + 1):
            by_frame.setdefault(f, []).append((slot, si))

    touch: list[TouchEvent] = []
    active: set[int] = set()
    for f in sorted(by_frame):
        entries = sorted(by_frame[f])
        t_ns = BASE_TIME_NS + int(round(f * dt_ms * NS_PER_MS))
        frame_events = []
        for slot, si in entries:
            _, pts, first, last = strokes[si]
            if f == first:
                action = TouchAction.DOWN if not active else TouchAction.POINTER_DOWN
                active.add(si)
            elif f == last:
                action = None  # decided below, after all downs of this frame
            else:
                action = TouchAction.MOVE
            frame_events.append([slot, si, action])
        for fe in frame_events:
            _, si, action = fe
            if action is None:
                active.discard(si)
                fe[2] = TouchAction.UP if not active else TouchAction.POINTER_UP
        for number, (slot, si, action) in enumerate(frame_events):
            _, pts, first, last = strokes[si]
            u = (f - first) / (last - first)
            x, y = _polyline_point(pts, u)
            x += jitter(profile.tremor_px)
            y += jitter(profile.tremor_px)
            pressure = pressure_level * (1.0 + 0.15 * math.sin(math.pi * u))
            pressure += jitter(profile.sigma_pressure)
            size = size_level + 0.03 * math.sin(math.pi * u)
            size += jitter(profile.sigma_size)
            touch.append(
                TouchEvent(
                    gesture_id=gesture_id or f"g-{shape.name}",
                    round=round_,
                    event_time_ns=t_ns,
                    pointer_id=slot,
                    pointer_number=number,
                    action=action,
                    x=max(x, 0.0),
                    y=max(y, 0.0),
                    pressure=min(max(pressure, 0.0), 2.0),
                    size=min(max(size, 0.0), 1.0),
                )
            )

    # motion streams: nominal sinusoid plus smooth OU noise, wider than the
    # touch window so snuggling has something to trim
    first_ms = min(f for f in by_frame) * dt_ms
    last_ms = max(f for f in by_frame) * dt_ms
    gyro = _motion_stream(
        rng, Sensor.GYRO, gyro_amp, freq, _GYRO_PHASES,
        (0.0, 0.0, 0.0), first_ms - 250.0, last_ms + 200.0, motion_hz, 0.0,
        profile.sigma_motion * settle, gesture_id or f"g-{shape.name}", round_,
    )
    accel = _motion_stream(
        rng, Sensor.ACCEL, accel_amp, freq * 1.15, _ACCEL_PHASES,
        _ACCEL_OFFSET, first_ms - 250.0, last_ms + 200.0, motion_hz, 2.0,
        profile.sigma_motion * settle, gesture_id or f"g-{shape.name}", round_,
    )

    meta = GestureMeta(
        gesture_id=gesture_id or f"g-{shape.name}",
        name=shape.name,
        round=round_,
        secret_mode=secret_mode,
        background_image_mode=background_image_mode,
    )
    return GestureTrace(meta=meta, touch=touch, gyro=gyro, accel=accel)


def _motion_stream(
    rng: np.random.Generator,
    sensor: Sensor,
    amp: float,
    freq_hz: float,
    phases: tuple[float, float, float],
    offset: tuple[float, float, float],
    start_ms: float,
    end_ms: float,
    motion_hz: float,
    phase_shift_ms: float,
    sigma_motion: float,
    gesture_id: str,
    round_: int,
) -> list[MotionEvent]:
    dt = 1000.0 / motion_hz
    times = np.arange(start_ms + phase_shift_ms, end_ms, dt)
    n = times.size
    # Ornstein-Uhlenbeck noise, tau = 80 ms, stationary scale relative to amp
    tau = 80.0
    alpha = math.exp(-dt / tau)
    q = math.sqrt(1.0 - alpha * alpha)
    sigma = sigma_motion * amp
    noise = np.zeros((n, 3))
    draws = rng.normal(size=(n, 3))
    for k in range(1, n):
        noise[k] = noise[k - 1] * alpha + draws[k] * q
    noise *= sigma

    out: list[MotionEvent] = []
    w = 2.0 * math.pi * freq_hz / 1000.0
    for k, t_ms in enumerate(times):
        v = tuple(
            offset[i] + amp * math.sin(w * t_ms + phases[i]) + noise[k, i]
            for i in range(3)
        )
        out.append(
            MotionEvent(
                gesture_id=gesture_id,
                round=round_,
                sensor=sensor,
                event_time_ns=BASE_TIME_NS + int(round(t_ms * NS_PER_MS)),
                v=v,  # type: ignore[arg-type]
            )
        )
    return out


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

@dataclass
class Report:
    shape: str
    n_trials: int
    max_attempts: int
    # accepted attempt number per trial, 0 = never accepted
    genuine_accept_attempt: list[int] = field(default_factory=list)
    impostor_accept_attempt: list[int] = field(default_factory=list)
    genuine_fault_categories: dict[int, int] = field(default_factory=dict)
    impostor_fault_categories: dict[int, int] = field(default_factory=dict)

    def tpr(self, attempts: int) -> float:
        if not self.genuine_accept_attempt:
            return 0.0
        hits = sum(1 for a in self.genuine_accept_attempt if 0 < a <= attempts)
        return hits / len(self.genuine_accept_attempt)

    def fpr(self, attempts: int) -> float:
        if not self.impostor_accept_attempt:
            return 0.0
        hits = sum(1 for a in self.impostor_accept_attempt if 0 < a <= attempts)
        return hits / len(self.impostor_accept_attempt)


def _run_session(record, probes, cfg) -> tuple[int, list[AttemptResult]]:
    session = VerificationSession(record=record, cfg=cfg)
    for i, probe in enumerate(probes, start=1):
        result = session.submit(probe)
        if result.accepted:
            return i, session.attempts
    return 0, session.attempts


def run_experiment(
    shape: GestureShape,
    user_profile: UserProfile,
    impostor_profile: ImpostorProfile,
    n_trials: int,
    cfg: SmaugConfig,
) -> Report:
    """Enroll once from the user profile, then run n_trials genuine and
    n_trials impostor sessions with the configured attempt budget."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    traces = [gen_trace(shape, user_profile, r) for r in range(1, cfg.rounds + 1)]
    record = enroll(f"user-{user_profile.seed}", traces, cfg)
    max_attempts = cfg.retries + 1
    report = Report(shape=shape.name, n_trials=n_trials, max_attempts=max_attempts)

    attacker = impostor_profile.effective()
    for trial in range(n_trials):
        base = 1000 + trial * max_attempts
        probes = [
            gen_trace(shape, user_profile, base + a) for a in range(max_attempts)
        ]
        accepted_at, attempts = _run_session(record, probes, cfg)
        report.genuine_accept_attempt.append(accepted_at)
        _count_categories(attempts, report.genuine_fault_categories)

        base = 100000 + trial * max_attempts
        probes = [gen_trace(shape, attacker, base + a) for a in range(max_attempts)]
        accepted_at, attempts = _run_session(record, probes, cfg)
        report.impostor_accept_attempt.append(accepted_at)
        _count_categories(attempts, report.impostor_fault_categories)
    return report


def _count_categories(attempts: list[AttemptResult], hist: dict[int, int]) -> None:
    for result in attempts:
        for fault in result.faults:
            hist[fault.category] = hist.get(fault.category, 0) + 1


def emit_report(report: Report, format: str = "text") -> bytes:
    """Deterministic report rendering.

    csv columns: metric, key, value — metric is one of tpr/fpr (key =
    cumulative attempt count), trials/max_attempts (key empty), or
    faults_genuine/faults_impostor (key = check category).
    """
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", "key", "value"])
        writer.writerow(["shape", "", report.shape])
        writer.writerow(["trials", "", report.n_trials])
        writer.writerow(["max_attempts", "", report.max_attempts])
        for a in range(1, report.max_attempts + 1):
            writer.writerow(["tpr", a, f"{report.tpr(a):.4f}"])
        for a in range(1, report.max_attempts + 1):
            writer.writerow(["fpr", a, f"{report.fpr(a):.4f}"])
        for name, hist in (
            ("faults_genuine", report.genuine_fault_categories),
            ("faults_impostor", report.impostor_fault_categories),
        ):
            for cat in sorted(hist):
                writer.writerow([name, cat, hist[cat]])
        return buf.getvalue().encode("utf-8")
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")

    lines = [
        f"shape: {report.shape}",
        f"trials: {report.n_trials} genuine + {report.n_trials} impostor",
        f"attempt budget: {report.max_attempts}",
    ]
    for a in range(1, report.max_attempts + 1):
        lines.append(f"TPR(<= {a} attempts): {report.tpr(a):.4f}")
    for a in range(1, report.max_attempts + 1):
        lines.append(f"FPR(<= {a} attempts): {report.fpr(a):.4f}")
    for name, hist in (
        ("genuine", report.genuine_fault_categories),
        ("impostor", report.impostor_fault_categories),
    ):
        total = sum(hist.values())
        lines.append(f"fault categories ({name}, {total} total):")
        for cat in sorted(hist):
            lines.append(f"  category {cat}: {hist[cat]}")
    return ("\n".join(lines) + "\n").encode("utf-8")
