import pytest

from smaug.errors import CorruptRecord, MalformedDocument, NotFound, VersionMismatch
from smaug.store import TemplateStore, parse_record, serialize_record

PAYLOAD = {"version": 1, "user": "alice", "value": [1, 2.5, "x"], "nested": {"a": True}}


def test_round_trip():
    doc = serialize_record(PAYLOAD)
    assert parse_record(doc) == PAYLOAD


def test_serialization_deterministic():
    assert serialize_record(PAYLOAD) == serialize_record(dict(reversed(PAYLOAD.items())))


def test_header():
    doc = serialize_record(PAYLOAD).decode()
    lines = doc.splitlines()
    assert lines[0] == "#SMAUG-TEMPLATE v1"
    assert lines[1].startswith("sha256=")


def test_wrong_header_version():
    doc = serialize_record(PAYLOAD).decode().splitlines()
    doc[0] = "#SMAUG-TEMPLATE v2"
    with pytest.raises(VersionMismatch):
        parse_record(("\n".join(doc) + "\n").encode())


def test_too_short():
    with pytest.raises(MalformedDocument):
        parse_record(b"#SMAUG-TEMPLATE v1\n")


def test_missing_checksum_line():
    with pytest.raises(MalformedDocument):
        parse_record(b"#SMAUG-TEMPLATE v1\nnope\n{}\n")


def test_tampered_body_detected():
    doc = bytearray(serialize_record(PAYLOAD))
    doc[bytes(doc).rindex(b"alice")] ^= 0x01  # flip a bit inside the body
    with pytest.raises(CorruptRecord):
        parse_record(bytes(doc))


def test_bad_utf8():
    with pytest.raises(CorruptRecord):
        parse_record(b"#SMAUG-TEMPLATE v1\nsha256=00\n\xff\xfe\n")


def test_body_must_be_object():
    import hashlib

    body = b"[1,2]"
    digest = hashlib.sha256(body).hexdigest()
    doc = f"#SMAUG-TEMPLATE v1\nsha256={digest}\n".encode() + body + b"\n"
    with pytest.raises(CorruptRecord):
        parse_record(doc)


def test_store_save_load_delete(tmp_path):
    store = TemplateStore(str(tmp_path))
    path = store.save("alice", "g1", PAYLOAD)
    assert path.endswith(".smaug")
    assert store.load("alice", "g1") == PAYLOAD
    store.delete("alice", "g1")
    with pytest.raises(NotFound):
        store.load("alice", "g1")
    with pytest.raises(NotFound):
        store.delete("alice", "g1")


def test_store_listing(tmp_path):
    store = TemplateStore(str(tmp_path))
    assert store.list_users() == []
    assert store.list_gestures("nobody") == []
    store.save("alice", "g2", PAYLOAD)
    store.save("alice", "g1", PAYLOAD)
    store.save("bob/../x", "g a", PAYLOAD)  # hostile names are quoted away
    assert store.list_gestures("alice") == ["g1", "g2"]
    assert store.list_users() == ["alice", "bob/../x"]
    assert store.list_gestures("bob/../x") == ["g a"]
    # nothing escaped the store root
    import os

    for dirpath, _, _ in os.walk(tmp_path):
        assert str(tmp_path) in dirpath


def test_store_overwrite(tmp_path):
    store = TemplateStore(str(tmp_path))
    store.save("alice", "g1", PAYLOAD)
    store.save("alice", "g1", {"version": 2})
    assert store.load("alice", "g1") == {"version": 2}
