"""Recyclability scoring for waste electronic components and pick planning."""

from wecr.core import (
    Bonding,
    ComponentSpec,
    MaterialEntry,
    RecyclabilityResult,
    Zone,
    assess_component,
    classify_zone,
    compute_entropy,
    compute_grade,
    compute_recyclability,
    normalize,
)
from wecr.db import (
    AggregateEntry,
    BondingClass,
    ComponentDatabase,
    ComponentRecord,
    audit_consistency,
    load_database,
    load_default_database,
    lookup_component,
    validate_database,
)
from wecr.detections import BoundDetection, Detection, bind_detections, parse_detections
from wecr.planner import PickPlan, PlannerConfig, ScoreMode, build_plan, plan_summary

__version__ = "0.1.0"
