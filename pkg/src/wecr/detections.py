"""Reading detector output and binding it to catalogued components.

Detections arrive as JSON lines, one object per detected component::

    {"board_id": "b1", "class": "IC", "bbox": [10, 10, 40, 40], "confidence": 0.91}

``bbox`` is ``[x, y, width, height]`` in pixels. Blank lines and lines
starting with ``#`` are ignored. A single bad line rejects the whole batch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

from wecr.core import assess_component
from wecr.db import ComponentDatabase, ComponentRecord
from wecr.errors import LineError, UnknownComponentError, WecrError


@dataclass(frozen=True)
class Detection:
    board_id: str
    class_label: str
    bbox: tuple[float, float, float, float]
    confidence: float

    @property
    def area(self) -> float:
        return self.bbox[2] * self.bbox[3]


@dataclass(frozen=True)
class BoundDetection:
    detection: Detection
    record: ComponentRecord
    recyclability_point: float


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def parse_detection(line: str, line_number: int) -> Detection:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LineError(line_number, f"malformed JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise LineError(line_number, "expected a JSON object")
    missing = [k for k in ("board_id", "class", "bbox", "confidence") if k not in obj]
    if missing:
        raise LineError(line_number, f"missing key(s) {', '.join(missing)}")

    board_id, label = obj["board_id"], obj["class"]
    if not isinstance(board_id, str) or not board_id:
        raise LineError(line_number, "board_id must be a nonempty string")
    if not isinstance(label, str) or not label:
        raise LineError(line_number, "class must be a nonempty string")

    bbox = obj["bbox"]
    if not isinstance(bbox, list) or len(bbox) != 4 or not all(_is_number(v) for v in bbox):
        raise LineError(line_number, "bbox must be an array of 4 numbers")
    x, y, w, h = (float(v) for v in bbox)
    if x < 0 or y < 0:
        raise LineError(line_number, "negative bbox coordinate")
    if w <= 0 or h <= 0:
        raise LineError(line_number, "bbox width and height must be positive")

    conf = obj["confidence"]
    if not _is_number(conf):
        raise LineError(line_number, "confidence must be a number")
    if not 0 <= conf <= 1:
        raise LineError(line_number, "confidence out of range")

    return Detection(board_id, label, (x, y, w, h), float(conf))


def parse_detections(stream: TextIO | Iterable[str] | str) -> list[Detection]:
    if isinstance(stream, str):
        stream = stream.splitlines()
    out = []
    for i, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        out.append(parse_detection(text, i))
    return out


def detection_to_json(det: Detection) -> dict:
    return {
        "board_id": det.board_id,
        "class": det.class_label,
        "bbox": list(det.bbox),
        "confidence": det.confidence,
    }


def serialize_detections(detections: Iterable[Detection]) -> str:
    return "".join(json.dumps(detection_to_json(d)) + "\n" for d in detections)


def bind_detections(detections: Iterable[Detection], db: ComponentDatabase
                    ) -> tuple[list[BoundDetection], list[Detection]]:
    """Attach a catalogue record and a point recyclability to each detection.

    Detections whose label is unknown, or whose record carries no usable
    recyclability (bonding class only, or a degenerate composition), come
    back in the second list. Both lists keep input order.
    """
    cache: dict[str, tuple[ComponentRecord, float] | None] = {}
    bound, unbound = [], []
    for det in detections:
        if det.class_label not in cache:
            cache[det.class_label] = _resolve(db, det.class_label)
        hit = cache[det.class_label]
        if hit is None:
            unbound.append(det)
        else:
            bound.append(BoundDetection(det, hit[0], hit[1]))
    return bound, unbound


def _resolve(db: ComponentDatabase, label: str) -> tuple[ComponentRecord, float] | None:
    try:
        rec = db.lookup(label)
    except UnknownComponentError:
        return None
    if rec.aggregate is not None:
        r = rec.aggregate.recyclability_mid
    elif rec.composition is not None:
        try:
            r = assess_component(rec.composition).recyclability
        except (WecrError, ValueError):
            return None
    else:
        return None
    return (rec, r) if r > 0 else None
