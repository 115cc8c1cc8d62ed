"""Cross-validation checks, fault container, feature weights, thresholds."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import SecurityParams, SmaugConfig
from .dtw import dtw
from .features import (
    DTW_TOUCH_FEATURES,
    FUSION_SEQ_FEATURES,
    GESTURE_CHECK_FEATURES,
    STROKE_SCALARS,
    am,
    stdev,
)
from .pipeline import RoundData
from .template import FiveStat, GestureTemplate


class Cmp(Enum):
    LB = "LB"
    UB = "UB"
    EQ = "EQ"


@dataclass(frozen=True)
class FaultEntry:
    category: int           # check category 1..7, used for stable ordering
    feature: str
    cmp: Cmp
    round: int
    stroke: int | None = None


@dataclass(frozen=True)
class ComparisonFeature:
    feature: str
    cmp: Cmp
    stroke_scoped: bool
    tier: int
    category: int


@dataclass
class WeightSet:
    # (feature, cmp value, stroke index or -1) -> weight
    weights: dict[tuple[str, str, int], float]
    i_f: float
    i_w: float
    n_strokes: int

    def weight_of(self, fault: FaultEntry) -> float:
        stroke = fault.stroke if fault.stroke is not None else -1
        return self.weights.get((fault.feature, fault.cmp.value, stroke), 0.0)


@dataclass(frozen=True)
class Thresholds:
    theta1: float
    theta2: float
    params: SecurityParams


# ---------------------------------------------------------------------------
# comparison primitives
# ---------------------------------------------------------------------------

def cmp_lb(v: float, am_: float, min_: float, stdev_: float) -> bool:
    """True when the value passes the lower-bound check."""
    return not v < 0.5 * (am_ + min_) - stdev_


def cmp_ub(v: float, am_: float, max_: float, stdev_: float) -> bool:
    """True when the value passes the upper-bound check."""
    return not v > 0.5 * (am_ + max_) + stdev_


def cmp_eq(v, w) -> bool:
    return v == w


# ---------------------------------------------------------------------------
# catalog and tiers
# ---------------------------------------------------------------------------

_TIER2_STROKE_STATS = {"x", "y", "p", "s"}


def default_tier(feature: str) -> int:
    """Tier assignment: structural and directly drawn geometry highest,
    touch dynamics statistics middle, motion statistics lowest."""
    head = feature.split(".", 1)[0]
    if head in ("strong", "gesture", "strokeDtw") or feature in (
        "stroke.pointerId",
        "stroke.pointerNumber",
    ):
        return 3
    if head == "fusionDtw":
        return 2
    if head == "stroke":
        rest = feature.split(".", 1)[1]
        seq = rest.split(".", 1)[0]
        if seq in _TIER2_STROKE_STATS or rest in STROKE_SCALARS:
            return 2
        return 1
    return 1  # gyro.*, accel.*, fusion.*


def tier_of(feature: str, cfg: SmaugConfig) -> int:
    for prefix, tier in cfg.tier_overrides.items():
        if feature.startswith(prefix):
            return tier
    return default_tier(feature)


def build_catalog(template: GestureTemplate, cfg: SmaugConfig) -> list[ComparisonFeature]:
    """All comparison features checked for this gesture, in check order."""
    out: list[ComparisonFeature] = []

    def add(feature: str, cmp: Cmp, stroke_scoped: bool, category: int) -> None:
        out.append(
            ComparisonFeature(feature, cmp, stroke_scoped, tier_of(feature, cfg), category)
        )

    add("strong.strokeCount", Cmp.EQ, False, 1)
    add("strong.maxPointers", Cmp.EQ, False, 1)
    for name in GESTURE_CHECK_FEATURES:
        add(f"gesture.{name}", Cmp.LB, False, 2)
        add(f"gesture.{name}", Cmp.UB, False, 2)
    for key in sorted(template.t6[0].keys()) if template.t6 else []:
        add(f"stroke.{key}", Cmp.LB, True, 3)
        add(f"stroke.{key}", Cmp.UB, True, 3)
    add("stroke.pointerId", Cmp.EQ, True, 4)
    add("stroke.pointerNumber", Cmp.EQ, True, 4)
    for feat in DTW_TOUCH_FEATURES:
        add(f"strokeDtw.{feat}", Cmp.UB, True, 4)
    if template.has_motion:
        for sensor, table in (("gyro", template.g3), ("accel", template.a3)):
            for key in sorted(table.keys()):
                add(f"{sensor}.{key}", Cmp.LB, False, 5)
                add(f"{sensor}.{key}", Cmp.UB, False, 5)
        for key in sorted(template.f3.keys()):
            add(f"fusion.{key}", Cmp.LB, False, 6)
            add(f"fusion.{key}", Cmp.UB, False, 6)
        for feat in FUSION_SEQ_FEATURES:
            add(f"fusionDtw.{feat}", Cmp.UB, False, 7)
    return out


# ---------------------------------------------------------------------------
# cross-validation
# ---------------------------------------------------------------------------

def _bound_checks(
    faults: list[FaultEntry],
    category: int,
    prefix: str,
    values: dict[str, float],
    table: dict[str, FiveStat],
    round_: int,
    stroke: int | None = None,
) -> None:
    for key in sorted(table.keys()):
        fs = table[key]
        v = values[key]
        if not cmp_lb(v, fs.am, fs.min, fs.stdev):
            faults.append(FaultEntry(category, f"{prefix}.{key}", Cmp.LB, round_, stroke))
        if not cmp_ub(v, fs.am, fs.max, fs.stdev):
            faults.append(FaultEntry(category, f"{prefix}.{key}", Cmp.UB, round_, stroke))


def cross_validate(rd: RoundData, template: GestureTemplate, cfg: SmaugConfig) -> list[FaultEntry]:
    """Run the seven check categories of one round against the template and
    return its fault entries in deterministic order."""
    faults: list[FaultEntry] = []
    r = rd.round

    # 1. strong features
    if not cmp_eq(rd.t2.stroke_count, template.stroke_count):
        faults.append(FaultEntry(1, "strong.strokeCount", Cmp.EQ, r))
    if not cmp_eq(rd.t2.max_pointers, template.max_pointers):
        faults.append(FaultEntry(1, "strong.maxPointers", Cmp.EQ, r))

    # 2. touch gesture bounds
    _bound_checks(faults, 2, "gesture", rd.t2.check_values(), template.t5, r)

    # 3. per-stroke statistics; unmatched strokes on either side are skipped
    n_check = min(len(rd.stroked.strokes), len(template.t6))
    for s in range(n_check):
        _bound_checks(faults, 3, "stroke", rd.t3[s], template.t6[s], r, stroke=s)

    # 4. structural equality and DTW distances against the best round
    best = template.best_round_data()
    for s in range(n_check):
        probe_stroke = rd.stroked.strokes[s]
        best_stroke = best.stroked.strokes[s]
        if not cmp_eq(probe_stroke.pointer_id, best_stroke.pointer_id):
            faults.append(FaultEntry(4, "stroke.pointerId", Cmp.EQ, r, s))
        probe_pn = rd.stroked.events[probe_stroke.events[0]].pointer_number
        best_pn = best.stroked.events[best_stroke.events[0]].pointer_number
        if not cmp_eq(probe_pn, best_pn):
            faults.append(FaultEntry(4, "stroke.pointerNumber", Cmp.EQ, r, s))
        for feat in DTW_TOUCH_FEATURES:
            d = dtw(rd.stroke_sequence(s, feat), best.stroke_sequence(s, feat))
            fs = template.t4.stats[(s, feat)]
            if not cmp_ub(d, fs.am, fs.max, fs.stdev):
                faults.append(FaultEntry(4, f"strokeDtw.{feat}", Cmp.UB, r, s))

    # 5..7. motion checks, only when the template carries motion tables
    if template.has_motion:
        if not rd.has_motion:
            # probe lacks motion data the gesture requires: every motion
            # comparison counts as failed
            for cf in build_catalog(template, cfg):
                if cf.category in (5, 6, 7):
                    faults.append(FaultEntry(cf.category, cf.feature, cf.cmp, r))
        else:
            _bound_checks(faults, 5, "gyro", rd.g2, template.g3, r)
            _bound_checks(faults, 5, "accel", rd.a2, template.a3, r)
            _bound_checks(faults, 6, "fusion", rd.fusion_features.correlations, template.f3, r)
            motion_best = template.motion_best_round_data()
            for feat in FUSION_SEQ_FEATURES:
                a = rd.fusion_features.sequences[feat]
                b = motion_best.fusion_features.sequences[feat]
                a = a if a.size else np.zeros(1)
                b = b if b.size else np.zeros(1)
                d = dtw(a, b)
                fs = template.f4.stats[feat]
                if not cmp_ub(d, fs.am, fs.max, fs.stdev):
                    faults.append(FaultEntry(7, f"fusionDtw.{feat}", Cmp.UB, r))

    faults.sort(key=lambda f: (f.category, f.round, -1 if f.stroke is None else f.stroke, f.feature, f.cmp.value))
    return faults


# ---------------------------------------------------------------------------
# weights and indicators
# ---------------------------------------------------------------------------

def compute_weights(
    faults: list[FaultEntry],
    catalog: list[ComparisonFeature],
    n_strokes: int,
    cfg: SmaugConfig,
) -> dict[tuple[str, str, int], float]:
    """A weight for every comparison feature in the catalog: full tier value
    at zero faults, linearly down to zero when every round faulted."""
    counts: dict[tuple[str, str, int], set[int]] = {}
    for f in faults:
        key = (f.feature, f.cmp.value, f.stroke if f.stroke is not None else -1)
        counts.setdefault(key, set()).add(f.round)

    weights: dict[tuple[str, str, int], float] = {}
    for cf in catalog:
        tier_value = cfg.tier_value(cf.tier)
        strokes = range(n_strokes) if cf.stroke_scoped else (-1,)
        for s in strokes:
            key = (cf.feature, cf.cmp.value, s)
            n_faults = len(counts.get(key, ()))
            weights[key] = tier_value * (1.0 - n_faults / cfg.rounds)
    return weights


def compute_indicators(
    faults: list[FaultEntry],
    weights: dict[tuple[str, str, int], float],
    n_rounds: int,
) -> tuple[float, float]:
    """Global fault-count and weighted-fault-sum indicators: per-round sums
    summarized as mean plus standard deviation."""
    per_round_f = np.zeros(n_rounds)
    per_round_w = np.zeros(n_rounds)
    for f in faults:
        idx = f.round - 1
        per_round_f[idx] += 1.0
        stroke = f.stroke if f.stroke is not None else -1
        per_round_w[idx] += weights.get((f.feature, f.cmp.value, stroke), 0.0)
    i_f = am(per_round_f) + stdev(per_round_f)
    i_w = am(per_round_w) + stdev(per_round_w)
    return i_f, i_w


def attempt_indicators(faults: list[FaultEntry], weight_set: WeightSet) -> tuple[float, float]:
    """Single-attempt indicators: plain fault count and stored-weight sum."""
    i_f = float(len(faults))
    i_w = float(sum(weight_set.weight_of(f) for f in faults))
    return i_f, i_w


def compute_thresholds(
    weight_set: WeightSet, n_strokes: int, params: SecurityParams
) -> Thresholds:
    theta1 = weight_set.i_w * params.w_mul + params.w_add * (1 + n_strokes)
    theta2 = weight_set.i_f * params.f_mul + params.f_add * (1 + n_strokes)
    return Thresholds(theta1=theta1, theta2=theta2, params=params)
