import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wecr.core import Zone
from wecr.db import load_default_database
from wecr.detections import BoundDetection, Detection, bind_detections
from wecr.planner import (
    ExclusionReason,
    PlannerConfig,
    ScoreMode,
    build_plan,
    plan_summary,
)
from wecr.report import render_plan_json

DB = load_default_database()


def det(label, board="b1", bbox=(0, 0, 10, 10), conf=1.0):
    return Detection(board, label, tuple(float(v) for v in bbox), conf)


def bound_with(r, label="X", **kw):
    rec = DB.lookup("diode")
    return BoundDetection(det(label, **kw), rec, r)


def plan_of(dets, cfg=None):
    bound, unbound = bind_detections(dets, DB)
    return build_plan(bound, unbound, cfg)


def test_config_defaults_and_validation():
    cfg = PlannerConfig()
    assert cfg.recovery_threshold == 18
    assert cfg.confidence_floor == 0.0
    assert cfg.score_mode is ScoreMode.RECYCLABILITY_TIMES_CONFIDENCE
    assert PlannerConfig(score_mode="recyclability-only").score_mode is ScoreMode.RECYCLABILITY_ONLY
    with pytest.raises(ValueError):
        PlannerConfig(recovery_threshold=-1)
    with pytest.raises(ValueError):
        PlannerConfig(confidence_floor=1.5)


def test_all_below_threshold():
    [plan] = build_plan([bound_with(10), bound_with(10, bbox=(5, 5, 3, 3))], [])
    assert plan.picks == ()
    assert [e.reason for e in plan.exclusions] == [ExclusionReason.BELOW_RECOVERY] * 2


def test_capacitor_before_ic():
    [plan] = plan_of([det("IC"), det("Aluminum Capacitor")])
    assert [p.component_id for p in plan.picks] == ["aluminum-capacitor", "ic"]


def test_area_breaks_score_ties():
    [plan] = plan_of([det("Diode", bbox=(0, 0, 20, 20)), det("Diode", bbox=(50, 0, 40, 40))])
    assert [p.detection.bbox[2] for p in plan.picks] == [40, 20]


def test_label_breaks_area_ties():
    [plan] = build_plan([bound_with(60, "b-label"), bound_with(60, "a-label")])
    assert [p.detection.class_label for p in plan.picks] == ["a-label", "b-label"]


def test_confidence_weighting_and_floor():
    dets = [det("Diode", conf=0.3), det("IC", conf=1.0), det("Resistor", conf=0.05)]
    [plan] = plan_of(dets, PlannerConfig(confidence_floor=0.1))
    # 76 * 0.3 = 22.8 < 33 * 1.0
    assert [p.component_id for p in plan.picks] == ["ic", "diode"]
    assert [(e.component_id, e.reason) for e in plan.exclusions] == [
        ("resistor", ExclusionReason.LOW_CONFIDENCE)]


def test_below_recovery_takes_precedence_over_low_confidence():
    [plan] = plan_of([det("IC", conf=0.01)], PlannerConfig(recovery_threshold=40,
                                                           confidence_floor=0.5))
    assert plan.exclusions[0].reason is ExclusionReason.BELOW_RECOVERY


def test_unbound_excluded():
    [plan] = plan_of([det("mystery"), det("Diode")])
    assert len(plan.picks) == 1
    assert plan.exclusions[0].reason is ExclusionReason.UNBOUND
    assert plan.exclusions[0].recyclability_point is None


def test_boards_sorted():
    plans = plan_of([det("IC", board="z"), det("IC", board="a"), det("nope", board="m")])
    assert [p.board_id for p in plans] == ["a", "m", "z"]
    assert plans[1].picks == ()


def test_recyclability_only_order():
    labels = ["IC", "Resistor", "Tantalum Capacitor", "Inductor", "Transistor",
              "Aluminum Capacitor", "Diode"]
    [plan] = plan_of([det(c, conf=0.8) for c in labels],
                     PlannerConfig(score_mode=ScoreMode.RECYCLABILITY_ONLY))
    assert [p.recyclability_point for p in plan.picks] == [76, 68, 58, 52, 45, 39, 33]


# ---------------------------------------------------------------- properties

LABELS = ["Diode", "IC", "Resistor", "coil", "capacitor-al", "Tantalum Capacitor",
          "Transistor", "PCB", "unknown"]

detection_lists = st.lists(st.builds(
    det,
    st.sampled_from(LABELS),
    board=st.sampled_from(["b1", "b2", "b3"]),
    bbox=st.tuples(st.integers(0, 50), st.integers(0, 50), st.integers(1, 5), st.integers(1, 5)),
    conf=st.sampled_from([0.2, 0.5, 0.9, 1.0]),
), max_size=40)


@settings(max_examples=60)
@given(detection_lists, st.randoms(use_true_random=False))
def test_permutation_gives_identical_plan(dets, rnd):
    cfg = PlannerConfig()
    reference = render_plan_json(plan_of(dets), cfg)
    shuffled = list(dets)
    rnd.shuffle(shuffled)
    assert render_plan_json(plan_of(shuffled), cfg) == reference


@given(detection_lists)
def test_partition_per_board(dets):
    plans = plan_of(dets)
    for plan in plans:
        on_board = sorted((d for d in dets if d.board_id == plan.board_id), key=repr)
        seen = sorted([p.detection for p in plan.picks] + [e.detection for e in plan.exclusions],
                      key=repr)
        assert seen == on_board


@given(detection_lists, st.floats(0, 100), st.floats(0, 100))
def test_threshold_monotonicity(dets, t1, t2):
    lo, hi = sorted((t1, t2))
    low = plan_of(dets, PlannerConfig(recovery_threshold=lo))
    high = plan_of(dets, PlannerConfig(recovery_threshold=hi))
    for pl, ph in zip(low, high):
        picked_lo = Counter(p.detection for p in pl.picks)
        picked_hi = Counter(p.detection for p in ph.picks)
        assert not picked_hi - picked_lo
        dropped = picked_lo - picked_hi
        below = Counter(e.detection for e in ph.exclusions
                        if e.reason is ExclusionReason.BELOW_RECOVERY)
        assert not dropped - below


@given(detection_lists)
def test_recyclability_only_sorted_under_uniform_confidence(dets):
    dets = [Detection(d.board_id, d.class_label, d.bbox, 0.7) for d in dets]
    for plan in plan_of(dets, PlannerConfig(score_mode=ScoreMode.RECYCLABILITY_ONLY)):
        rs = [p.recyclability_point for p in plan.picks]
        assert rs == sorted(rs, reverse=True)


# ---------------------------------------------------------------- summary

def test_summary_empty():
    s = plan_summary([])
    assert s.boards == ()
    assert s.overall.n_picks == 0
    assert s.overall.mean_recyclability is None
    assert all(v == 0 for v in s.overall.zone_counts.values())
    assert all(v == 0 for v in s.overall.exclusion_counts.values())


def test_summary_mean():
    s = plan_summary(plan_of([det("Aluminum Capacitor"), det("IC")]))
    assert s.boards[0].mean_recyclability == pytest.approx(50.5)
    assert s.boards[0].zone_counts[Zone.EASY] == 1
    assert s.boards[0].zone_counts[Zone.MODERATE] == 1


def test_summary_exclusions_only():
    s = plan_summary(plan_of([det("IC"), det("nope")], PlannerConfig(recovery_threshold=100)))
    b = s.boards[0]
    assert b.n_picks == 0 and b.mean_recyclability is None
    assert b.exclusion_counts[ExclusionReason.BELOW_RECOVERY] == 1
    assert b.exclusion_counts[ExclusionReason.UNBOUND] == 1
    assert b.n_exclusions == 2


def test_summary_overall_spans_boards():
    s = plan_summary(plan_of([det("Diode", board="a"), det("IC", board="b"), det("x", board="b")]))
    assert s.overall.n_picks == 2
    assert s.overall.mean_recyclability == pytest.approx((76 + 33) / 2)
    assert s.overall.exclusion_counts[ExclusionReason.UNBOUND] == 1


def test_random_shuffles_of_fifty():
    rnd = random.Random(11)
    dets = [det(rnd.choice(LABELS), board=rnd.choice("pqr"),
                bbox=(rnd.randint(0, 9), rnd.randint(0, 9), rnd.randint(1, 3), rnd.randint(1, 3)),
                conf=rnd.choice([0.5, 1.0]))
            for _ in range(50)]
    ref = render_plan_json(plan_of(dets), PlannerConfig())
    for _ in range(20):
        rnd.shuffle(dets)
        assert render_plan_json(plan_of(dets), PlannerConfig()) == ref
