"""Template generation: statistical summaries and DTW best-round tables."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SmaugConfig
from .dtw import dtw
from .errors import InsufficientRounds, StrokeCountMismatch
from .features import (
    DTW_TOUCH_FEATURES,
    FUSION_SEQ_FEATURES,
    GESTURE_CHECK_FEATURES,
    am,
    median,
    stdev,
)
from .pipeline import RoundData
from .trace import GestureMeta


@dataclass(frozen=True)
class FiveStat:
    min: float
    max: float
    stdev: float
    median: float
    am: float

    @classmethod
    def of(cls, values) -> "FiveStat":
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            return cls(0.0, 0.0, 0.0, 0.0, 0.0)
        return cls(
            min=float(values.min()),
            max=float(values.max()),
            stdev=stdev(values),
            median=median(values),
            am=am(values),
        )


@dataclass
class DtwTemplate:
    """Best round plus distance spread per feature (and per stroke for touch)."""

    best_round: int  # 1-based round number
    # touch: keys (stroke_index, feature); motion: feature name
    stats: dict


@dataclass
class GestureTemplate:
    meta: GestureMeta
    stroke_count: int          # strong feature, floored mean
    max_pointers: int          # strong feature, floored mean
    t5: dict[str, FiveStat]
    t6: list[dict[str, FiveStat]]
    t4: DtwTemplate
    g3: dict[str, FiveStat] | None
    a3: dict[str, FiveStat] | None
    f3: dict[str, FiveStat] | None
    f4: DtwTemplate | None
    rounds: list[RoundData]

    @property
    def multi_touch(self) -> bool:
        return self.max_pointers > 1

    @property
    def has_motion(self) -> bool:
        return self.g3 is not None

    def best_round_data(self) -> RoundData:
        return self.rounds[self.t4.best_round - 1]

    def motion_best_round_data(self) -> RoundData | None:
        if self.f4 is None:
            return None
        return self.rounds[self.f4.best_round - 1]


def _check_stroke_counts(rounds: list[RoundData]) -> int:
    counts = [len(rd.stroked.strokes) for rd in rounds]
    expected = counts[0]
    for rd, got in zip(rounds, counts):
        if got != expected:
            raise StrokeCountMismatch(rd.round, expected, got)
    return expected


def _best_round(per_feature_distances: dict, n_rounds: int) -> tuple[int, np.ndarray]:
    """Given full pairwise distance matrices per feature, pick the round with
    the smallest mean normalized average distance (lowest index on ties)."""
    norm_avgs = []
    for dist in per_feature_distances.values():
        avg = dist.mean(axis=1)  # self distance 0 included in the mean
        m = avg.max()
        norm_avgs.append(avg / m if m > 0 else np.zeros_like(avg))
    dbar = np.mean(norm_avgs, axis=0) if norm_avgs else np.zeros(n_rounds)
    best = int(np.argmin(dbar))  # argmin takes the first on ties
    return best, dbar


def touch_dtw_template(rounds: list[RoundData]) -> DtwTemplate:
    n = len(rounds)
    n_strokes = _check_stroke_counts(rounds)
    distances: dict[tuple[int, str], np.ndarray] = {}
    for s in range(n_strokes):
        for feat in DTW_TOUCH_FEATURES:
            seqs = [rd.stroke_sequence(s, feat) for rd in rounds]
            dist = np.zeros((n, n))
            for r in range(n):
                for r2 in range(r + 1, n):
                    d = dtw(seqs[r], seqs[r2])
                    dist[r, r2] = dist[r2, r] = d
            distances[(s, feat)] = dist
    best, _ = _best_round(distances, n)
    stats = {
        key: FiveStat.of([dist[best, r] for r in range(n) if r != best])
        for key, dist in distances.items()
    }
    return DtwTemplate(best_round=best + 1, stats=stats)


def touch_gesture_template(rounds: list[RoundData]) -> tuple[int, int, dict[str, FiveStat]]:
    """Strong features (floored means) and the spread of the gesture-global
    touch features."""
    stroke_count = math.floor(am([rd.t2.stroke_count for rd in rounds]))
    max_pointers = math.floor(am([rd.t2.max_pointers for rd in rounds]))
    t5 = {
        name: FiveStat.of([rd.t2.check_values()[name] for rd in rounds])
        for name in GESTURE_CHECK_FEATURES
    }
    return stroke_count, max_pointers, t5


def touch_stroke_template(rounds: list[RoundData]) -> list[dict[str, FiveStat]]:
    n_strokes = _check_stroke_counts(rounds)
    out = []
    for s in range(n_strokes):
        keys = rounds[0].t3[s].keys()
        out.append({key: FiveStat.of([rd.t3[s][key] for rd in rounds]) for key in keys})
    return out


def motion_round_template(per_round: list[dict[str, float]]) -> dict[str, FiveStat]:
    keys = per_round[0].keys()
    return {key: FiveStat.of([rec[key] for rec in per_round]) for key in keys}


def motion_fusion_template(per_round: list[dict[str, float]]) -> dict[str, FiveStat]:
    return motion_round_template(per_round)


def motion_dtw_template(rounds: list[RoundData]) -> DtwTemplate:
    n = len(rounds)
    distances: dict[str, np.ndarray] = {}
    for feat in FUSION_SEQ_FEATURES:
        seqs = [rd.fusion_features.sequences[feat] for rd in rounds]
        dist = np.zeros((n, n))
        for r in range(n):
            for r2 in range(r + 1, n):
                # degenerate rounds with too few fusion events compare as a
                # single zero sample rather than poisoning the table
                a = seqs[r] if seqs[r].size else np.zeros(1)
                b = seqs[r2] if seqs[r2].size else np.zeros(1)
                d = dtw(a, b)
                dist[r, r2] = dist[r2, r] = d
        distances[feat] = dist
    best, _ = _best_round(distances, n)
    stats = {
        key: FiveStat.of([dist[best, r] for r in range(n) if r != best])
        for key, dist in distances.items()
    }
    return DtwTemplate(best_round=best + 1, stats=stats)


def generate_template(
    meta: GestureMeta, rounds: list[RoundData], cfg: SmaugConfig
) -> GestureTemplate:
    """Assemble the full gesture template from the processed enrollment rounds."""
    if len(rounds) != cfg.rounds:
        raise InsufficientRounds(f"expected {cfg.rounds} rounds, got {len(rounds)}")
    stroke_count, max_pointers, t5 = touch_gesture_template(rounds)
    t6 = touch_stroke_template(rounds)
    t4 = touch_dtw_template(rounds)

    # Motion tables exist only when every round produced usable motion data;
    # otherwise motion checks are disabled consistently for this gesture.
    if all(rd.has_motion for rd in rounds):
        g3 = motion_round_template([rd.g2 for rd in rounds])
        a3 = motion_round_template([rd.a2 for rd in rounds])
        f3 = motion_fusion_template([rd.fusion_features.correlations for rd in rounds])
        f4 = motion_dtw_template(rounds)
    else:
        g3 = a3 = f3 = f4 = None

    return GestureTemplate(
        meta=meta,
        stroke_count=stroke_count,
        max_pointers=max_pointers,
        t5=t5,
        t6=t6,
        t4=t4,
        g3=g3,
        a3=a3,
        f3=f3,
        f4=f4,
        rounds=rounds,
    )
