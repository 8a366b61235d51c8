"""Greedy pick ordering for the disassembly manipulator.

Each board is planned independently. Detections below the recovery
threshold or the confidence floor are excluded, the rest are ranked by
score, highest first. The ranking is a total order, so the plan does not
depend on the order detections arrived in:

    score desc, bbox area desc, class label, x, y, width, height,
    confidence desc, recyclability desc, component id, input position

Any two detections that tie on everything before the input position are
indistinguishable in the serialized plan.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from wecr.core import RECOVERY_THRESHOLD, Zone, classify_zone
from wecr.detections import BoundDetection, Detection


class ScoreMode(str, Enum):
    RECYCLABILITY_ONLY = "recyclability-only"
    RECYCLABILITY_TIMES_CONFIDENCE = "recyclability-times-confidence"


class ExclusionReason(str, Enum):
    BELOW_RECOVERY = "BelowRecovery"
    LOW_CONFIDENCE = "LowConfidence"
    UNBOUND = "Unbound"


_REASON_ORDER = {r: i for i, r in enumerate(ExclusionReason)}


@dataclass(frozen=True)
class PlannerConfig:
    recovery_threshold: float = RECOVERY_THRESHOLD
    confidence_floor: float = 0.0
    score_mode: ScoreMode = ScoreMode.RECYCLABILITY_TIMES_CONFIDENCE

    def __post_init__(self):
        if not self.recovery_threshold >= 0:
            raise ValueError("recovery_threshold must be >= 0")
        if not 0 <= self.confidence_floor <= 1:
            raise ValueError("confidence_floor must lie in [0, 1]")
        object.__setattr__(self, "score_mode", ScoreMode(self.score_mode))


@dataclass(frozen=True)
class Pick:
    detection: Detection
    component_id: str
    recyclability_point: float
    score: float

    @property
    def zone(self) -> Zone:
        return classify_zone(self.recyclability_point)


@dataclass(frozen=True)
class Exclusion:
    detection: Detection
    reason: ExclusionReason
    component_id: str | None = None
    recyclability_point: float | None = None


@dataclass(frozen=True)
class PickPlan:
    board_id: str
    picks: tuple[Pick, ...]
    exclusions: tuple[Exclusion, ...]


def _bbox_key(det: Detection):
    return (det.class_label, *det.bbox, -det.confidence)


def _pick_key(item: tuple[int, Pick]):
    idx, p = item
    return (-p.score, -p.detection.area, *_bbox_key(p.detection),
            -p.recyclability_point, p.component_id, idx)


def _exclusion_key(item: tuple[int, Exclusion]):
    idx, e = item
    r = -e.recyclability_point if e.recyclability_point is not None else math.inf
    return (_REASON_ORDER[e.reason], *_bbox_key(e.detection), r, e.component_id or "", idx)


def score(recyclability: float, confidence: float, mode: ScoreMode) -> float:
    if mode is ScoreMode.RECYCLABILITY_ONLY:
        return recyclability
    return recyclability * confidence


def build_plan(bound: Iterable[BoundDetection], unbound: Iterable[Detection] = (),
               cfg: PlannerConfig | None = None) -> list[PickPlan]:
    cfg = cfg or PlannerConfig()
    picks: dict[str, list[tuple[int, Pick]]] = {}
    excl: dict[str, list[tuple[int, Exclusion]]] = {}
    idx = 0

    for b in bound:
        det = b.detection
        board = det.board_id
        picks.setdefault(board, [])
        excl.setdefault(board, [])
        cid, r = b.record.component_id, b.recyclability_point
        if r < cfg.recovery_threshold:
            excl[board].append((idx, Exclusion(det, ExclusionReason.BELOW_RECOVERY, cid, r)))
        elif det.confidence < cfg.confidence_floor:
            excl[board].append((idx, Exclusion(det, ExclusionReason.LOW_CONFIDENCE, cid, r)))
        else:
            picks[board].append((idx, Pick(det, cid, r, score(r, det.confidence, cfg.score_mode))))
        idx += 1

    for det in unbound:
        picks.setdefault(det.board_id, [])
        excl.setdefault(det.board_id, []).append((idx, Exclusion(det, ExclusionReason.UNBOUND)))
        idx += 1

    return [
        PickPlan(
            board_id=board,
            picks=tuple(p for _, p in sorted(picks[board], key=_pick_key)),
            exclusions=tuple(e for _, e in sorted(excl[board], key=_exclusion_key)),
        )
        for board in sorted(picks)
    ]


@dataclass(frozen=True)
class BoardSummary:
    board_id: str | None
    n_picks: int = 0
    zone_counts: dict[Zone, int] = field(default_factory=lambda: {z: 0 for z in Zone})
    mean_recyclability: float | None = None
    exclusion_counts: dict[ExclusionReason, int] = field(
        default_factory=lambda: {r: 0 for r in ExclusionReason})

    @property
    def n_exclusions(self) -> int:
        return sum(self.exclusion_counts.values())


@dataclass(frozen=True)
class PlanSummary:
    boards: tuple[BoardSummary, ...]
    overall: BoardSummary


def _summarize(board_id, picks, exclusions) -> BoardSummary:
    zones = Counter(p.zone for p in picks)
    reasons = Counter(e.reason for e in exclusions)
    mean = math.fsum(p.recyclability_point for p in picks) / len(picks) if picks else None
    return BoardSummary(
        board_id=board_id,
        n_picks=len(picks),
        zone_counts={z: zones[z] for z in Zone},
        mean_recyclability=mean,
        exclusion_counts={r: reasons[r] for r in ExclusionReason},
    )


def plan_summary(plans: Iterable[PickPlan]) -> PlanSummary:
    plans = list(plans)
    boards = tuple(_summarize(p.board_id, p.picks, p.exclusions) for p in plans)
    overall = _summarize(None,
                         [x for p in plans for x in p.picks],
                         [x for p in plans for x in p.exclusions])
    return PlanSummary(boards, overall)
