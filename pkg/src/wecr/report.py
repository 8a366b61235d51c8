"""Rendering of plans and of the component recyclability map.

All output is deterministic: fixed float formatting, ``\\n`` line endings and
no timestamps, so reruns on the same inputs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from xml.sax.saxutils import escape

from wecr.core import EASY_THRESHOLD, MODERATE_THRESHOLD, RECOVERY_THRESHOLD, Zone, classify_zone
from wecr.db import ComponentDatabase
from wecr.planner import BoardSummary, PickPlan, PlannerConfig, plan_summary

PLAN_SCHEMA_VERSION = 1
MAP_COLUMNS = ("component_id", "r_low", "r_mid", "r_high", "zone")


def _num(x: float | None, digits: int = 6):
    if x is None:
        return None
    return round(x, digits) + 0.0


# ---------------------------------------------------------------- plans

def _summary_json(s: BoardSummary) -> dict:
    return {
        "picks": s.n_picks,
        "zones": {z.value: n for z, n in s.zone_counts.items()},
        "mean_recyclability": _num(s.mean_recyclability),
        "exclusions": {r.value: n for r, n in s.exclusion_counts.items()},
    }


def plan_to_json(plans: list[PickPlan], cfg: PlannerConfig) -> dict:
    summary = plan_summary(plans)
    boards = []
    for plan, bsum in zip(plans, summary.boards):
        boards.append({
            "board_id": plan.board_id,
            "picks": [
                {
                    "rank": i,
                    "class": p.detection.class_label,
                    "component_id": p.component_id,
                    "bbox": [_num(v) for v in p.detection.bbox],
                    "confidence": _num(p.detection.confidence),
                    "recyclability": _num(p.recyclability_point),
                    "score": _num(p.score),
                    "zone": p.zone.value,
                }
                for i, p in enumerate(plan.picks, start=1)
            ],
            "exclusions": [
                {
                    "class": e.detection.class_label,
                    "component_id": e.component_id,
                    "bbox": [_num(v) for v in e.detection.bbox],
                    "confidence": _num(e.detection.confidence),
                    "recyclability": _num(e.recyclability_point),
                    "reason": e.reason.value,
                }
                for e in plan.exclusions
            ],
            "summary": _summary_json(bsum),
        })
    return {
        "version": PLAN_SCHEMA_VERSION,
        "config": {
            "recovery_threshold": _num(cfg.recovery_threshold),
            "confidence_floor": _num(cfg.confidence_floor),
            "score_mode": cfg.score_mode.value,
        },
        "boards": boards,
        "summary": _summary_json(summary.overall),
    }


_NUMBER_LIST = re.compile(r"\[\s+([-0-9.e,\s]+?)\s+\]")


def render_plan_json(plans: list[PickPlan], cfg: PlannerConfig) -> str:
    text = json.dumps(plan_to_json(plans, cfg), indent=2)
    # keep bbox arrays on one line
    text = _NUMBER_LIST.sub(lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text)
    return text + "\n"


def _fmt_bbox(bbox) -> str:
    return "[" + ",".join(f"{v:g}" for v in bbox) + "]"


def render_plan_table(plans: list[PickPlan]) -> str:
    lines = []
    summary = plan_summary(plans)
    for plan, bsum in zip(plans, summary.boards):
        lines.append(f"board {plan.board_id}: {len(plan.picks)} picks, "
                     f"{len(plan.exclusions)} excluded")
        if plan.picks:
            lines.append(f"  {'#':>3}  {'class':<22} {'component':<20} {'R':>8} "
                         f"{'conf':>6} {'score':>9}  {'zone':<9} bbox")
        for i, p in enumerate(plan.picks, start=1):
            lines.append(f"  {i:>3}  {p.detection.class_label:<22} {p.component_id:<20} "
                         f"{p.recyclability_point:>8.2f} {p.detection.confidence:>6.3f} "
                         f"{p.score:>9.4f}  {p.zone.value:<9} {_fmt_bbox(p.detection.bbox)}")
        for e in plan.exclusions:
            lines.append(f"    x  {e.detection.class_label:<22} "
                         f"{_fmt_bbox(e.detection.bbox):<20} {e.reason.value}")
        if bsum.mean_recyclability is not None:
            lines.append(f"  mean R of picks: {bsum.mean_recyclability:.4f}")
        lines.append("")
    o = summary.overall
    mean = "n/a" if o.mean_recyclability is None else f"{o.mean_recyclability:.4f}"
    reasons = " ".join(f"{r.value}={n}" for r, n in o.exclusion_counts.items())
    lines.append(f"total: {len(plans)} boards, {o.n_picks} picks, mean R {mean}; "
                 f"excluded {reasons}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- map

@dataclass(frozen=True)
class MapRow:
    component_id: str
    r_low: float
    r_mid: float
    r_high: float
    zone: Zone


def map_rows(db: ComponentDatabase) -> list[MapRow]:
    """One row per aggregate, highest midpoint first."""
    rows = [
        MapRow(a.component_id, a.r_low, a.recyclability_mid, a.r_high,
               classify_zone(a.recyclability_mid))
        for a in db.aggregates()
    ]
    rows.sort(key=lambda r: (-r.r_mid, r.component_id))
    return rows


def render_map_csv(rows: list[MapRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MAP_COLUMNS)
    for r in rows:
        w.writerow([r.component_id, f"{r.r_low:.4f}", f"{r.r_mid:.4f}",
                    f"{r.r_high:.4f}", r.zone.value])
    return buf.getvalue()


def parse_map_csv(text: str) -> list[MapRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != MAP_COLUMNS:
        raise ValueError(f"unexpected map header {header!r}")
    return [MapRow(cid, float(lo), float(mid), float(hi), Zone(zone))
            for cid, lo, mid, hi, zone in reader]


_ZONE_COLORS = {
    Zone.BELOW_RECOVERY: "#9e9e9e",
    Zone.DIFFICULT: "#d9534f",
    Zone.MODERATE: "#f0ad4e",
    Zone.EASY: "#5cb85c",
}
_REFERENCE_LINES = (
    (RECOVERY_THRESHOLD, "18 recovery"),
    (MODERATE_THRESHOLD, "30"),
    (EASY_THRESHOLD, "50"),
)


def render_map_svg(rows: list[MapRow]) -> str:
    """Horizontal bars spanning each component's recyclability band."""
    left, right, top, row_h, bar_h = 170, 30, 40, 28, 16
    plot_w = 520
    r_max = max([100.0, *(r.r_high for r in rows)])
    r_max = math.ceil(r_max / 10) * 10
    height = top + row_h * max(len(rows), 1) + 40
    width = left + plot_w + right

    def x(r: float) -> float:
        return left + plot_w * max(r, 0.0) / r_max

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        '<title>Recyclability map (R per bit)</title>',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    axis_y = top + row_h * max(len(rows), 1)
    out.append(f'<line x1="{left}" y1="{axis_y}" x2="{left + plot_w}" y2="{axis_y}" '
               f'stroke="#000000"/>')
    for tick in range(0, r_max + 1, 10):
        tx = x(tick)
        out.append(f'<line x1="{tx:.2f}" y1="{axis_y}" x2="{tx:.2f}" y2="{axis_y + 4}" '
                   f'stroke="#000000"/>')
        out.append(f'<text x="{tx:.2f}" y="{axis_y + 16}" text-anchor="middle">{tick}</text>')
    out.append(f'<text x="{left + plot_w / 2:.2f}" y="{axis_y + 32}" '
               f'text-anchor="middle">R (/bit)</text>')

    for i, row in enumerate(rows):
        y = top + row_h * i + (row_h - bar_h) / 2
        x0, x1, xm = x(row.r_low), x(row.r_high), x(row.r_mid)
        out.append(f'<text x="{left - 8}" y="{y + bar_h - 4:.2f}" text-anchor="end">'
                   f'{escape(row.component_id)}</text>')
        out.append(f'<rect x="{x0:.2f}" y="{y:.2f}" width="{max(x1 - x0, 1.0):.2f}" '
                   f'height="{bar_h}" fill="{_ZONE_COLORS[row.zone]}">'
                   f'<title>{escape(row.component_id)}: {row.r_low:.4f} to {row.r_high:.4f}, '
                   f'mid {row.r_mid:.4f} ({row.zone.value})</title></rect>')
        out.append(f'<line x1="{xm:.2f}" y1="{y:.2f}" x2="{xm:.2f}" y2="{y + bar_h:.2f}" '
                   f'stroke="#000000" stroke-width="2"/>')

    for value, label in _REFERENCE_LINES:
        rx = x(value)
        out.append(f'<line x1="{rx:.2f}" y1="{top - 10}" x2="{rx:.2f}" y2="{axis_y}" '
                   f'stroke="#333333" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{rx:.2f}" y="{top - 14}" text-anchor="middle" '
                   f'font-size="10">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
