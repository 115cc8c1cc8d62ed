import dataclasses

import pytest

from smaug.checks import (
    Cmp,
    ComparisonFeature,
    FaultEntry,
    WeightSet,
    attempt_indicators,
    build_catalog,
    cmp_eq,
    cmp_lb,
    cmp_ub,
    compute_indicators,
    compute_thresholds,
    compute_weights,
    cross_validate,
    default_tier,
    tier_of,
)
from smaug.config import default_config, experiment_config
from smaug.pipeline import process_round
from smaug.synth import SHAPES, UserProfile, gen_trace
from smaug.template import generate_template


@pytest.fixture(scope="module")
def enrolled():
    cfg = default_config()
    profile = UserProfile(seed=17)
    shape = SHAPES["A"]
    traces = [gen_trace(shape, profile, round_=r) for r in range(1, cfg.rounds + 1)]
    rounds = [process_round(t, cfg) for t in traces]
    template = generate_template(traces[0].meta, rounds, cfg)
    return cfg, profile, shape, template


# ---------------------------------------------------------------------------
# comparison primitives
# ---------------------------------------------------------------------------

def test_cmp_lb_examples():
    # bound is 0.5*(5+3)-1 = 3; below fails, at the bound passes
    assert not cmp_lb(1, 5, 3, 1)
    assert cmp_lb(3, 5, 3, 1)


def test_cmp_ub_examples():
    # bound is 0.5*(4+6)+0 = 5; above fails, at the bound passes
    assert not cmp_ub(10, 4, 6, 0)
    assert cmp_ub(5, 4, 6, 0)


def test_cmp_eq():
    assert cmp_eq(3, 3)
    assert not cmp_eq(3, 4)


# ---------------------------------------------------------------------------
# tiers and catalog
# ---------------------------------------------------------------------------

def test_default_tiers():
    assert default_tier("strong.strokeCount") == 3
    assert default_tier("gesture.boxWidth") == 3
    assert default_tier("strokeDtw.x") == 3
    assert default_tier("stroke.pointerId") == 3
    assert default_tier("stroke.pointerNumber") == 3
    assert default_tier("stroke.x.am") == 2
    assert default_tier("stroke.p.stdev") == 2
    assert default_tier("stroke.lengthNs") == 2
    assert default_tier("fusionDtw.angle.0") == 2
    assert default_tier("stroke.c.am") == 1
    assert default_tier("stroke.vx.max") == 1
    assert default_tier("gyro.a1.0.am") == 1
    assert default_tier("accel.normF.2") == 1
    assert default_tier("fusion.pcc11") == 1


def test_tier_override_prefix():
    cfg = dataclasses.replace(default_config(), tier_overrides={"gyro.": 3})
    assert tier_of("gyro.a1.0.am", cfg) == 3
    assert tier_of("accel.a1.0.am", cfg) == 1


def test_catalog_structure(enrolled):
    cfg, _, _, template = enrolled
    catalog = build_catalog(template, cfg)
    # categories appear in order
    cats = [cf.category for cf in catalog]
    assert cats == sorted(cats)
    by_cat = {c: [cf for cf in catalog if cf.category == c] for c in range(1, 8)}
    assert len(by_cat[1]) == 2
    assert len(by_cat[2]) == 14            # 7 gesture features x LB/UB
    assert len(by_cat[3]) == 2 * 106       # per-stroke stats+scalars x LB/UB
    assert len(by_cat[4]) == 2 + 3         # pointer equalities + 3 DTW features
    assert len(by_cat[5]) == 2 * 2 * 90    # two sensors x 90 features x LB/UB
    assert len(by_cat[6]) == 2 * 9
    assert len(by_cat[7]) == 6


def test_catalog_without_motion(enrolled):
    cfg, _, _, template = enrolled
    no_motion = dataclasses.replace(template, g3=None, a3=None, f3=None, f4=None)
    catalog = build_catalog(no_motion, cfg)
    assert all(cf.category <= 4 for cf in catalog)


# ---------------------------------------------------------------------------
# cross validation
# ---------------------------------------------------------------------------

def test_enrollment_round_few_faults(enrolled):
    cfg, _, _, template = enrolled
    catalog_size = len(build_catalog(template, cfg))
    for rd in template.rounds:
        faults = cross_validate(rd, template, cfg)
        # enrollment rounds sit inside their own bounds almost everywhere;
        # the early rounds are sloppier (motor learning) but still far from
        # faulting a significant share of the catalog
        assert len(faults) < 0.3 * catalog_size
        for f in faults:
            assert f.round == rd.round


def test_fault_order_deterministic(enrolled):
    cfg, _, _, template = enrolled
    faults = cross_validate(template.rounds[0], template, cfg)
    key = lambda f: (f.category, f.round, -1 if f.stroke is None else f.stroke, f.feature, f.cmp.value)
    assert faults == sorted(faults, key=key)


def test_stroke_count_mismatch_strong_fault(enrolled):
    cfg, profile, _, template = enrolled
    probe = process_round(gen_trace(SHAPES["square"], profile, round_=99), cfg)
    faults = cross_validate(probe, template, cfg)
    features = {f.feature for f in faults}
    assert "strong.strokeCount" in features
    strong = [f for f in faults if f.feature == "strong.strokeCount"]
    assert strong[0].cmp is Cmp.EQ and strong[0].category == 1


def test_probe_without_motion_faults_all_motion_checks(enrolled):
    cfg, profile, shape, template = enrolled
    probe = process_round(gen_trace(shape, profile, round_=55), cfg)
    stripped = dataclasses.replace(
        probe, gyro=[], accel=[], fusion=[], g2=None, a2=None, fusion_features=None
    )
    faults = cross_validate(stripped, template, cfg)
    motion_faults = [f for f in faults if f.category in (5, 6, 7)]
    catalog = build_catalog(template, cfg)
    n_motion = sum(1 for cf in catalog if cf.category in (5, 6, 7))
    assert len(motion_faults) == n_motion


# ---------------------------------------------------------------------------
# weights, indicators, thresholds
# ---------------------------------------------------------------------------

def test_weight_formula_example():
    # 3 faulting rounds of 10, tier 2 -> 2.0 * (1 - 3/10) = 1.4
    cfg = default_config()
    catalog = [ComparisonFeature("strong.strokeCount", Cmp.EQ, False, 3, 1)]
    faults = [FaultEntry(1, "strong.strokeCount", Cmp.EQ, r) for r in (1, 4, 7)]
    weights = compute_weights(faults, catalog, n_strokes=2, cfg=cfg)
    assert weights[("strong.strokeCount", "EQ", -1)] == pytest.approx(
        cfg.tier3 * 0.7
    )
    # tier-2 worked example under the stricter evaluation profile (tier2 = 2)
    cfg_x = experiment_config()
    catalog2 = [ComparisonFeature("stroke.x.am", Cmp.LB, True, 2, 3)]
    faults2 = [FaultEntry(3, "stroke.x.am", Cmp.LB, r, 0) for r in (2, 3, 5)]
    weights2 = compute_weights(faults2, catalog2, n_strokes=2, cfg=cfg_x)
    assert weights2[("stroke.x.am", "LB", 0)] == pytest.approx(1.4)
    # untouched stroke keeps the full tier value
    assert weights2[("stroke.x.am", "LB", 1)] == pytest.approx(2.0)


def test_weight_counts_distinct_rounds_once():
    cfg = default_config()
    catalog = [ComparisonFeature("gesture.boxWidth", Cmp.UB, False, 3, 2)]
    faults = [FaultEntry(2, "gesture.boxWidth", Cmp.UB, 4)] * 3
    weights = compute_weights(faults, catalog, 1, cfg)
    assert weights[("gesture.boxWidth", "UB", -1)] == pytest.approx(cfg.tier3 * 0.9)


def test_experiment_profile_tier_values():
    cfg = experiment_config()
    assert (cfg.tier1, cfg.tier2, cfg.tier3) == (0.5, 2.0, 4.0)


def test_indicators_mean_plus_stdev():
    weights = {("f", "EQ", -1): 1.0}
    faults = [FaultEntry(1, "f", Cmp.EQ, r) for r in (1, 1, 2)]
    i_f, i_w = compute_indicators(faults, weights, n_rounds=2)
    # per-round counts [2, 1]: mean 1.5, sample stdev sqrt(0.5)
    assert i_f == pytest.approx(1.5 + 0.5**0.5)
    assert i_w == pytest.approx(1.5 + 0.5**0.5)


def test_attempt_indicators_use_stored_weights():
    ws = WeightSet(
        weights={("f", "EQ", -1): 0.5, ("g", "LB", 2): 1.25},
        i_f=0.0,
        i_w=0.0,
        n_strokes=3,
    )
    faults = [
        FaultEntry(1, "f", Cmp.EQ, 1),
        FaultEntry(3, "g", Cmp.LB, 1, 2),
        FaultEntry(3, "unknown", Cmp.UB, 1, 0),
    ]
    i_f, i_w = attempt_indicators(faults, ws)
    assert i_f == 3.0
    assert i_w == pytest.approx(1.75)


def test_threshold_examples():
    cfg = default_config()
    # single-stroke, no background image: theta1 = 10*3 + 7*(1+1) = 44
    ws = WeightSet(weights={}, i_f=4.0, i_w=10.0, n_strokes=1)
    th = compute_thresholds(ws, 1, cfg.security_for(False, False))
    assert th.theta1 == pytest.approx(44.0)
    # background image + multi touch: theta2 = 4*2.1 + 4*(1+2) = 20.4
    ws2 = WeightSet(weights={}, i_f=4.0, i_w=10.0, n_strokes=2)
    th2 = compute_thresholds(ws2, 2, cfg.security_for(True, True))
    assert th2.theta2 == pytest.approx(20.4)


def test_security_table():
    cfg = default_config()
    assert cfg.security_for(True, False) == cfg.security[(True, False)]
    p = cfg.security_for(False, True)
    assert (p.w_mul, p.w_add, p.f_mul, p.f_add) == (2.5, 8.0, 2.5, 8.0)
