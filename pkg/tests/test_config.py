import json

import pytest

from smaug.config import default_config, experiment_config, load_config
from smaug.errors import MalformedDocument, VersionMismatch


def write(tmp_path, doc):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_defaults():
    cfg = default_config()
    assert cfg.rounds == 10
    assert cfg.retries == 2
    assert (cfg.tier1, cfg.tier2, cfg.tier3) == (0.75, 1.0, 2.0)
    assert cfg.snuggle_before_ms == 150.0
    assert cfg.snuggle_after_ms == 100.0
    assert cfg.fusion_window_ms == 10.0
    assert cfg.secret_mode_default is True


def test_security_defaults_complete():
    cfg = default_config()
    assert set(cfg.security) == {(a, b) for a in (True, False) for b in (True, False)}


def test_load_overrides(tmp_path):
    path = write(
        tmp_path,
        {
            "version": 1,
            "profile": "experiment",
            "rounds": 5,
            "security": {"nobg-single": {"w_mul": 9, "w_add": 1, "f_mul": 2, "f_add": 3}},
            "tier_overrides": {"gyro.": 3},
        },
    )
    cfg = load_config(path)
    assert cfg.rounds == 5
    assert (cfg.tier1, cfg.tier2, cfg.tier3) == (0.5, 2.0, 4.0)
    assert cfg.security_for(False, False).w_mul == 9
    # other modes keep their defaults
    assert cfg.security_for(True, True).w_mul == 2.2
    assert cfg.tier_overrides == {"gyro.": 3}


def test_load_rejects_wrong_version(tmp_path):
    with pytest.raises(VersionMismatch):
        load_config(write(tmp_path, {"version": 2}))
    with pytest.raises(VersionMismatch):
        load_config(write(tmp_path, {}))


def test_load_rejects_unknown_keys(tmp_path):
    with pytest.raises(MalformedDocument):
        load_config(write(tmp_path, {"version": 1, "bogus": 1}))


def test_load_rejects_bad_mode_name(tmp_path):
    doc = {"version": 1, "security": {"weird": {"w_mul": 1, "w_add": 1, "f_mul": 1, "f_add": 1}}}
    with pytest.raises(MalformedDocument):
        load_config(write(tmp_path, doc))


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    with pytest.raises(MalformedDocument):
        load_config(str(path))


def test_experiment_profile():
    cfg = experiment_config()
    assert (cfg.tier1, cfg.tier2, cfg.tier3) == (0.5, 2.0, 4.0)
    assert cfg.rounds == 10
