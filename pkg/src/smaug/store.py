"""On-disk registry for enrollment records.

Records are JSON payloads wrapped in a versioned, checksummed envelope:

    #SMAUG-TEMPLATE v1
    sha256=<hex digest of the body>
    <json body>
"""
from __future__ import annotations

import hashlib
import json
import os
from urllib.parse import quote, unquote

from .errors import CorruptRecord, MalformedDocument, NotFound, VersionMismatch

TEMPLATE_HEADER = "#SMAUG-TEMPLATE v1"


def serialize_record(payload: dict) -> bytes:
    body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    digest = hashlib.sha256(body).hexdigest()
    return f"{TEMPLATE_HEADER}\nsha256={digest}\n".encode("utf-8") + body + b"\n"


def parse_record(document: bytes) -> dict:
    try:
        text = document.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptRecord(f"not valid UTF-8: {exc}") from exc
    lines = text.split("\n", 2)
    if len(lines) < 3:
        raise MalformedDocument("record too short")
    header, checksum_line, body = lines
    if header != TEMPLATE_HEADER:
        raise VersionMismatch(f"unsupported record header {header!r}")
    if not checksum_line.startswith("sha256="):
        raise MalformedDocument("missing checksum line")
    body = body.rstrip("\n")
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if digest != checksum_line[len("sha256="):]:
        raise CorruptRecord("checksum mismatch")
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise CorruptRecord(f"body is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise CorruptRecord("body must be a JSON object")
    return payload


def _safe(name: str) -> str:
    return quote(name, safe="")


class TemplateStore:
    """Per-user directories of enrollment records under one root."""

    def __init__(self, root: str):
        self.root = root

    def _user_dir(self, user: str) -> str:
        return os.path.join(self.root, "users", _safe(user))

    def _path(self, user: str, gesture_id: str) -> str:
        return os.path.join(self._user_dir(user), _safe(gesture_id) + ".smaug")

    def save(self, user: str, gesture_id: str, payload: dict) -> str:
        path = self._path(user, gesture_id)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(serialize_record(payload))
        os.replace(tmp, path)
        return path

    def load(self, user: str, gesture_id: str) -> dict:
        path = self._path(user, gesture_id)
        try:
            with open(path, "rb") as fh:
                return parse_record(fh.read())
        except FileNotFoundError:
            raise NotFound(f"no record for user {user!r}, gesture {gesture_id!r}") from None

    def delete(self, user: str, gesture_id: str) -> None:
        try:
            os.remove(self._path(user, gesture_id))
        except FileNotFoundError:
            raise NotFound(f"no record for user {user!r}, gesture {gesture_id!r}") from None

    def list_gestures(self, user: str) -> list[str]:
        try:
            names = os.listdir(self._user_dir(user))
        except FileNotFoundError:
            return []
        return sorted(
            unquote(name[: -len(".smaug")]) for name in names if name.endswith(".smaug")
        )

    def list_users(self) -> list[str]:
        try:
            names = os.listdir(os.path.join(self.root, "users"))
        except FileNotFoundError:
            return []
        return sorted(unquote(name) for name in names)
