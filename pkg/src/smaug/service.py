"""Minimal HTTP service driving enrollment and verification sessions."""
from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field, replace

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .authflow import (
    VerificationSession,
    enroll,
    load_record,
    save_record,
    select_gesture,
)
from .config import SmaugConfig, default_config
from .errors import EmptyRegistry, NotFound, SmaugError
from .store import TemplateStore
from .trace import GestureTrace, parse_trace

DEFAULT_SESSION_TTL_S = 600.0


@dataclass
class SessionState:
    session_id: str
    user: str
    gesture_id: str
    gesture_name: str
    phase: str  # "enroll" | "verify"
    secret_mode: bool
    background_image_mode: bool
    expiry: float
    traces: list[GestureTrace] = field(default_factory=list)
    verification: VerificationSession | None = None
    complete: bool = False


def _normalize(trace: GestureTrace, gesture_id: str, round_: int) -> GestureTrace:
    """Stamp the session's gesture id and round onto a submitted trace."""
    meta = replace(trace.meta, gesture_id=gesture_id, round=round_)
    fix = lambda ev: replace(ev, gesture_id=gesture_id, round=round_)  # noqa: E731
    return GestureTrace(
        meta=meta,
        touch=[fix(ev) for ev in trace.touch],
        gyro=[fix(ev) for ev in trace.gyro],
        accel=[fix(ev) for ev in trace.accel],
    )


def create_app(
    data_dir: str,
    cfg: SmaugConfig | None = None,
    debug: bool = False,
    session_ttl_s: float = DEFAULT_SESSION_TTL_S,
) -> FastAPI:
    cfg = cfg or default_config()
    store = TemplateStore(data_dir)
    sessions: dict[str, SessionState] = {}
    app = FastAPI(title="smaug", docs_url=None, redoc_url=None)

    def error(status: int, detail: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": detail})

    def get_session(session_id: str) -> SessionState | None:
        state = sessions.get(session_id)
        if state is None:
            return None
        if time.monotonic() > state.expiry:
            del sessions[session_id]
            return None
        state.expiry = time.monotonic() + session_ttl_s
        return state

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            return error(400, "body must be a JSON object")
        user = body.get("user")
        mode = body.get("mode")
        if not user or mode not in ("enroll", "verify"):
            return error(400, "need user and mode in {enroll, verify}")
        session_id = uuid.uuid4().hex

        if mode == "enroll":
            name = body.get("gestureName")
            if not name:
                return error(400, "enroll needs gestureName")
            state = SessionState(
                session_id=session_id,
                user=user,
                gesture_id=uuid.uuid4().hex,
                gesture_name=name,
                phase="enroll",
                secret_mode=bool(body.get("secretMode", cfg.secret_mode_default)),
                background_image_mode=bool(body.get("backgroundImageMode", False)),
                expiry=time.monotonic() + session_ttl_s,
            )
            sessions[session_id] = state
            return {
                "sessionId": session_id,
                "mode": "enroll",
                "gestureId": state.gesture_id,
                "roundsRequired": cfg.rounds,
            }

        gesture_id = body.get("gestureId")
        try:
            if gesture_id is None:
                gesture_id = select_gesture(store, user)
            record = load_record(store, user, gesture_id, cfg)
        except (EmptyRegistry, NotFound) as exc:
            return error(404, str(exc))
        state = SessionState(
            session_id=session_id,
            user=user,
            gesture_id=gesture_id,
            gesture_name=record.template.meta.name,
            phase="verify",
            secret_mode=record.template.meta.secret_mode,
            background_image_mode=record.template.meta.background_image_mode,
            expiry=time.monotonic() + session_ttl_s,
            verification=VerificationSession(record=record, cfg=cfg),
        )
        sessions[session_id] = state
        prompt = {"attemptsAllowed": cfg.retries + 1}
        if not state.secret_mode:
            prompt["gestureName"] = state.gesture_name
        return {"sessionId": session_id, "mode": "verify", "prompt": prompt}

    @app.post("/sessions/{session_id}/rounds")
    async def post_round(session_id: str, request: Request):
        state = get_session(session_id)
        if state is None:
            return error(404, "unknown or expired session")
        if state.phase != "enroll":
            return error(409, "rounds may only be posted to enroll sessions")
        if state.complete:
            return error(409, "enrollment already complete")
        try:
            trace = parse_trace(await request.body())
        except SmaugError as exc:
            return error(400, str(exc))
        trace = _normalize(trace, state.gesture_id, len(state.traces) + 1)
        trace.meta = replace(
            trace.meta,
            name=state.gesture_name,
            secret_mode=state.secret_mode,
            background_image_mode=state.background_image_mode,
        )
        state.traces.append(trace)
        done = len(state.traces)
        if done < cfg.rounds:
            return {"roundsDone": done, "roundsRequired": cfg.rounds, "complete": False}
        try:
            record = enroll(state.user, state.traces, cfg)
        except SmaugError as exc:
            state.traces.clear()
            return error(400, f"enrollment failed: {exc}")
        save_record(store, record)
        state.complete = True
        return {
            "roundsDone": done,
            "roundsRequired": cfg.rounds,
            "complete": True,
            "gestureId": record.gesture_id,
        }

    @app.post("/sessions/{session_id}/attempts")
    async def post_attempt(session_id: str, request: Request):
        state = get_session(session_id)
        if state is None:
            return error(404, "unknown or expired session")
        if state.phase != "verify" or state.verification is None:
            return error(409, "attempts may only be posted to verify sessions")
        session = state.verification
        if session.status != "open":
            return error(409, f"session already {session.status}")
        try:
            trace = parse_trace(await request.body())
        except SmaugError as exc:
            return error(400, str(exc))
        trace = _normalize(trace, state.gesture_id, len(session.attempts) + 1)
        try:
            result = session.submit(trace)
        except SmaugError as exc:
            return error(400, str(exc))
        out = {
            "decision": result.accepted,
            "attemptsRemaining": session.max_attempts - len(session.attempts),
            "fallbackRequired": session.fallback_required,
        }
        if debug:
            out["iW"] = result.i_w
            out["iF"] = result.i_f
            out["theta1"] = result.theta1
            out["theta2"] = result.theta2
            out["faults"] = len(result.faults)
        return out

    @app.get("/users/{user}/gestures")
    def list_gestures(user: str):
        gestures = []
        for gesture_id in store.list_gestures(user):
            entry = {"gestureId": gesture_id}
            try:
                record = load_record(store, user, gesture_id, cfg)
            except SmaugError:
                continue
            if not record.template.meta.secret_mode:
                entry["name"] = record.template.meta.name
            gestures.append(entry)
        return {"user": user, "gestures": gestures}

    return app
