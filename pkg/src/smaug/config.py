"""System and security parameters, tier assignment, config documents."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import MalformedDocument, VersionMismatch

CONFIG_VERSION = 1


@dataclass(frozen=True)
class SecurityParams:
    """Threshold coefficients for one (background image, touch) mode."""

    w_mul: float
    w_add: float
    f_mul: float
    f_add: float


# Keyed by (background_image, multi_touch).
DEFAULT_SECURITY = {
    (True, False): SecurityParams(w_mul=2.5, w_add=6.0, f_mul=1.9, f_add=6.0),
    (True, True): SecurityParams(w_mul=2.2, w_add=4.0, f_mul=2.1, f_add=4.0),
    (False, False): SecurityParams(w_mul=3.0, w_add=7.0, f_mul=2.1, f_add=7.0),
    (False, True): SecurityParams(w_mul=2.5, w_add=8.0, f_mul=2.5, f_add=8.0),
}


@dataclass(frozen=True)
class SmaugConfig:
    rounds: int = 10                 # enrollment repetitions
    retries: int = 2                 # additional verification attempts
    tier1: float = 0.75
    tier2: float = 1.0
    tier3: float = 2.0
    snuggle_before_ms: float = 150.0
    snuggle_after_ms: float = 100.0
    fusion_window_ms: float = 10.0
    secret_mode_default: bool = True
    security: dict[tuple[bool, bool], SecurityParams] = field(
        default_factory=lambda: dict(DEFAULT_SECURITY)
    )
    # Feature-name prefixed overrides for the tier catalog, name -> 1|2|3.
    tier_overrides: dict[str, int] = field(default_factory=dict)

    def tier_value(self, tier: int) -> float:
        return {1: self.tier1, 2: self.tier2, 3: self.tier3}[tier]

    def security_for(self, background_image: bool, multi_touch: bool) -> SecurityParams:
        return self.security[(bool(background_image), bool(multi_touch))]


def default_config() -> SmaugConfig:
    return SmaugConfig()


def experiment_config() -> SmaugConfig:
    """Alternative tier multipliers used for the stricter evaluation profile."""
    return replace(default_config(), tier1=0.5, tier2=2.0, tier3=4.0)


_PROFILES = {"default": default_config, "experiment": experiment_config}


def load_config(path: str) -> SmaugConfig:
    """Load a versioned JSON config document; unknown keys are rejected."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"config: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("config: top level must be an object")
    version = doc.pop("version", None)
    if version != CONFIG_VERSION:
        raise VersionMismatch(f"config version {version!r}, expected {CONFIG_VERSION}")
    profile = doc.pop("profile", "default")
    if profile not in _PROFILES:
        raise MalformedDocument(f"config: unknown profile {profile!r}")
    cfg = _PROFILES[profile]()

    scalars = {
        "rounds": int,
        "retries": int,
        "tier1": float,
        "tier2": float,
        "tier3": float,
        "snuggle_before_ms": float,
        "snuggle_after_ms": float,
        "fusion_window_ms": float,
        "secret_mode_default": bool,
    }
    updates = {}
    for key, conv in scalars.items():
        if key in doc:
            updates[key] = conv(doc.pop(key))
    if "security" in doc:
        sec = dict(cfg.security)
        for name, params in doc.pop("security").items():
            bg, multi = _parse_mode(name)
            sec[(bg, multi)] = SecurityParams(**params)
        updates["security"] = sec
    if "tier_overrides" in doc:
        updates["tier_overrides"] = {
            str(k): int(v) for k, v in doc.pop("tier_overrides").items()
        }
    if doc:
        raise MalformedDocument(f"config: unknown keys {sorted(doc)}")
    return replace(cfg, **updates)


def _parse_mode(name: str) -> tuple[bool, bool]:
    # e.g. "bg-single", "nobg-multi"
    try:
        bg_part, touch_part = name.split("-")
        bg = {"bg": True, "nobg": False}[bg_part]
        multi = {"single": False, "multi": True}[touch_part]
    except (ValueError, KeyError) as exc:
        raise MalformedDocument(f"config: bad mode name {name!r}") from exc
    return bg, multi
