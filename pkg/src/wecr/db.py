"""File-backed catalogue of component classes.

A record carries either published aggregate metrics (an entropy range, a
point grade and a recyclability band) or a full material composition from
which the metrics are computed on demand. A record may also carry neither,
for classes that are catalogued for their bonding class only (the bare
board itself).

The on-disk format is a UTF-8 JSON document::

    {"version": 1,
     "components": [
        {"id": "diode", "display_name": "Diode", "aliases": ["..."],
         "bonding_class": "alloy_composite",
         "aggregate": {"h_min": 0.69, "h_max": 0.96, "d": 5.40,
                       "r_mid": 76, "r_halfwidth": 12}},
        ...]}

Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from wecr.core import (
    AMPLIFICATION,
    Bonding,
    ComponentSpec,
    MaterialEntry,
    check_normalized,
)
from wecr.errors import (
    CompositionError,
    DuplicateIdError,
    ParseError,
    SchemaError,
    UnknownComponentError,
)

SCHEMA_VERSION = 1
DEFAULT_N_CANDIDATES = range(1, 13)
DEFAULT_H_GRID_STEPS = 101


class BondingClass(str, Enum):
    COMPOSITE = "composite"
    ALLOY_COMPOSITE = "alloy_composite"


@dataclass(frozen=True)
class AggregateEntry:
    component_id: str
    bonding_class: BondingClass
    entropy_min: float
    entropy_max: float
    grade: float
    recyclability_mid: float
    recyclability_halfwidth: float

    @property
    def entropy_midpoint(self) -> float:
        return (self.entropy_min + self.entropy_max) / 2

    @property
    def r_low(self) -> float:
        return self.recyclability_mid - self.recyclability_halfwidth

    @property
    def r_high(self) -> float:
        return self.recyclability_mid + self.recyclability_halfwidth


@dataclass(frozen=True)
class ComponentRecord:
    component_id: str
    display_name: str
    bonding_class: BondingClass
    aliases: tuple[str, ...] = ()
    aggregate: AggregateEntry | None = None
    composition: ComponentSpec | None = None
    notes: str | None = None

    @property
    def labels(self) -> tuple[str, ...]:
        return (self.component_id, *self.aliases)


class ComponentDatabase:
    """Immutable, case-insensitive index over component records."""

    def __init__(self, records: Iterable[ComponentRecord] = ()):
        self._records = tuple(records)
        self._index: dict[str, ComponentRecord] = {}
        for rec in self._records:
            for label in rec.labels:
                key = _key(label)
                if key in self._index:
                    raise DuplicateIdError(label)
                self._index[key] = rec

    @property
    def records(self) -> tuple[ComponentRecord, ...]:
        return self._records

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[ComponentRecord]:
        return iter(self._records)

    def __eq__(self, other):
        if not isinstance(other, ComponentDatabase):
            return NotImplemented
        return self._records == other._records

    def __repr__(self):
        return f"ComponentDatabase({len(self)} records)"

    def lookup(self, label: str) -> ComponentRecord:
        try:
            return self._index[_key(label)]
        except KeyError:
            raise UnknownComponentError(label) from None

    def aggregates(self) -> list[AggregateEntry]:
        return [r.aggregate for r in self._records if r.aggregate is not None]


def _key(label: str) -> str:
    return label.strip().casefold()


def lookup_component(db: ComponentDatabase, class_label: str) -> ComponentRecord:
    return db.lookup(class_label)


# ---------------------------------------------------------------- parsing

_TOP_KEYS = {"version", "components"}
_COMPONENT_REQUIRED = {"id", "display_name", "bonding_class"}
_COMPONENT_OPTIONAL = {"aliases", "aggregate", "composition", "notes"}
_AGGREGATE_KEYS = {"h_min", "h_max", "d", "r_mid", "r_halfwidth"}
_COMPOSITION_KEYS = {"n_valences", "materials"}
_MATERIAL_KEYS = {"name", "fraction", "valence_rank", "bonding", "recoverable"}


def _expect_keys(obj, required, optional, where):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", field=where)
    unknown = sorted(set(obj) - required - optional)
    if unknown:
        raise SchemaError(f"unknown key(s) {', '.join(unknown)}", field=where)
    missing = sorted(required - set(obj))
    if missing:
        raise SchemaError(f"missing key(s) {', '.join(missing)}", field=where)


def _number(obj, key, where) -> float:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError("expected a finite number", field=f"{where}.{key}")
    return float(v)


def _integer(obj, key, where) -> int:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError("expected an integer", field=f"{where}.{key}")
    return v


def _string(obj, key, where) -> str:
    v = obj[key]
    if not isinstance(v, str) or not v.strip():
        raise SchemaError("expected a nonempty string", field=f"{where}.{key}")
    return v


def _enum(enum_cls, obj, key, where):
    try:
        return enum_cls(obj[key])
    except (ValueError, TypeError):
        allowed = "|".join(e.value for e in enum_cls)
        raise SchemaError(f"expected one of {allowed}", field=f"{where}.{key}") from None


def _parse_material(obj, where) -> MaterialEntry:
    _expect_keys(obj, _MATERIAL_KEYS, set(), where)
    recoverable = obj["recoverable"]
    if not isinstance(recoverable, bool):
        raise SchemaError("expected true or false", field=f"{where}.recoverable")
    return MaterialEntry(
        name=_string(obj, "name", where),
        fraction=_number(obj, "fraction", where),
        valence_rank=_integer(obj, "valence_rank", where),
        bonding=_enum(Bonding, obj, "bonding", where),
        recoverable=recoverable,
    )


def parse_component(obj, where: str = "component") -> ComponentRecord:
    """Build one record from its decoded JSON object."""
    _expect_keys(obj, _COMPONENT_REQUIRED, _COMPONENT_OPTIONAL, where)
    cid = _string(obj, "id", where)
    bonding_class = _enum(BondingClass, obj, "bonding_class", where)

    aliases = obj.get("aliases", [])
    if not isinstance(aliases, list) or not all(isinstance(a, str) and a.strip() for a in aliases):
        raise SchemaError("expected a list of nonempty strings", field=f"{where}.aliases")
    notes = obj.get("notes")
    if notes is not None and not isinstance(notes, str):
        raise SchemaError("expected a string", field=f"{where}.notes")
    if "aggregate" in obj and "composition" in obj:
        raise SchemaError("aggregate and composition are mutually exclusive", field=where)

    aggregate = composition = None
    if "aggregate" in obj:
        sub = f"{where}.aggregate"
        agg = obj["aggregate"]
        _expect_keys(agg, _AGGREGATE_KEYS, set(), sub)
        aggregate = AggregateEntry(
            component_id=cid,
            bonding_class=bonding_class,
            entropy_min=_number(agg, "h_min", sub),
            entropy_max=_number(agg, "h_max", sub),
            grade=_number(agg, "d", sub),
            recyclability_mid=_number(agg, "r_mid", sub),
            recyclability_halfwidth=_number(agg, "r_halfwidth", sub),
        )
    if "composition" in obj:
        sub = f"{where}.composition"
        comp = obj["composition"]
        _expect_keys(comp, _COMPOSITION_KEYS, set(), sub)
        mats = comp["materials"]
        if not isinstance(mats, list):
            raise SchemaError("expected a list", field=f"{sub}.materials")
        composition = ComponentSpec(
            component_id=cid,
            materials=tuple(_parse_material(m, f"{sub}.materials[{i}]")
                            for i, m in enumerate(mats)),
            valence_total=_integer(comp, "n_valences", sub),
        )

    return ComponentRecord(
        component_id=cid,
        display_name=_string(obj, "display_name", where),
        bonding_class=bonding_class,
        aliases=tuple(aliases),
        aggregate=aggregate,
        composition=composition,
        notes=notes,
    )


def parse_database(text: str) -> ComponentDatabase:
    if not text.strip():
        return ComponentDatabase()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    _expect_keys(doc, _TOP_KEYS, set(), "$")
    version = doc["version"]
    if isinstance(version, bool) or version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported version {version!r}", field="version")
    comps = doc["components"]
    if not isinstance(comps, list):
        raise SchemaError("expected a list", field="components")
    return ComponentDatabase(parse_component(c, f"components[{i}]") for i, c in enumerate(comps))


def load_database(path: str | Path) -> ComponentDatabase:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc.reason}") from None
    return parse_database(text)


def default_database_path() -> Path:
    return Path(str(resources.files("wecr") / "data" / "components.json"))


def load_default_database() -> ComponentDatabase:
    return load_database(default_database_path())


def record_to_json(rec: ComponentRecord) -> dict:
    obj: dict = {
        "id": rec.component_id,
        "display_name": rec.display_name,
        "aliases": list(rec.aliases),
        "bonding_class": rec.bonding_class.value,
    }
    if rec.aggregate is not None:
        a = rec.aggregate
        obj["aggregate"] = {
            "h_min": a.entropy_min,
            "h_max": a.entropy_max,
            "d": a.grade,
            "r_mid": a.recyclability_mid,
            "r_halfwidth": a.recyclability_halfwidth,
        }
    if rec.composition is not None:
        c = rec.composition
        obj["composition"] = {
            "n_valences": c.valence_total,
            "materials": [
                {"name": m.name, "fraction": m.fraction, "valence_rank": m.valence_rank,
                 "bonding": m.bonding.value, "recoverable": m.recoverable}
                for m in c.materials
            ],
        }
    if rec.notes is not None:
        obj["notes"] = rec.notes
    return obj


def dump_database(db: ComponentDatabase) -> str:
    doc = {"version": SCHEMA_VERSION, "components": [record_to_json(r) for r in db]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- auditing

@dataclass(frozen=True)
class FeasibilityReport:
    """Which valence totals N reproduce a published recyclability band.

    ``witnesses`` maps every feasible N to the first grid entropy that lands
    R inside the band, together with that R.
    """

    component_id: str
    feasible_n: tuple[int, ...]
    n_est: float
    witnesses: dict[int, tuple[float, float]] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return bool(self.feasible_n)

    @property
    def n_est_rounded(self) -> int:
        return round(self.n_est)


def entropy_grid(h_min: float, h_max: float, steps: int) -> list[float]:
    if steps < 2:
        raise ValueError("h_grid_steps must be >= 2")
    span = h_max - h_min
    grid = [h_min + span * k / (steps - 1) for k in range(steps)]
    grid[-1] = h_max
    return grid


def audit_consistency(entry: AggregateEntry,
                      n_candidates: Iterable[int] = DEFAULT_N_CANDIDATES,
                      h_grid_steps: int = DEFAULT_H_GRID_STEPS) -> FeasibilityReport:
    """Check an aggregate row against R = 100 D / (N H) on an N x H grid."""
    lo, hi = entry.r_low, entry.r_high
    grid = entropy_grid(entry.entropy_min, entry.entropy_max, h_grid_steps)
    feasible = []
    witnesses = {}
    for n in n_candidates:
        for h in grid:
            r = AMPLIFICATION * entry.grade / (n * h)
            if lo <= r <= hi:
                feasible.append(n)
                witnesses[n] = (h, r)
                break
    n_est = AMPLIFICATION * entry.grade / (entry.recyclability_mid * entry.entropy_midpoint)
    return FeasibilityReport(entry.component_id, tuple(feasible), n_est, witnesses)


@dataclass(frozen=True)
class Violation:
    component_id: str
    message: str

    def __str__(self):
        return f"{self.component_id}: {self.message}"


def _aggregate_problems(a: AggregateEntry) -> list[str]:
    problems = []
    values = (a.entropy_min, a.entropy_max, a.grade, a.recyclability_mid,
              a.recyclability_halfwidth)
    if not all(math.isfinite(v) for v in values):
        return ["aggregate contains a non-finite value"]
    if not 0 < a.entropy_min:
        problems.append(f"entropy_min {a.entropy_min} must be > 0")
    if a.entropy_min > a.entropy_max:
        problems.append(f"entropy_min {a.entropy_min} exceeds entropy_max {a.entropy_max}")
    if not a.grade > 0:
        problems.append(f"grade {a.grade} must be > 0")
    if not a.recyclability_mid > 0:
        problems.append(f"recyclability_mid {a.recyclability_mid} must be > 0")
    if a.recyclability_halfwidth < 0:
        problems.append(f"recyclability_halfwidth {a.recyclability_halfwidth} must be >= 0")
    return problems


def validate_database(db: ComponentDatabase) -> list[Violation]:
    """Collect invariant and consistency violations; an empty list means valid.

    The grid audit only runs on aggregates that satisfy their own invariants,
    so a broken row reports the broken invariant and nothing else.
    """
    out = []
    for rec in db:
        cid = rec.component_id
        if rec.aggregate is not None and rec.composition is not None:
            out.append(Violation(cid, "aggregate and composition are mutually exclusive"))
        if rec.aggregate is not None:
            problems = _aggregate_problems(rec.aggregate)
            out.extend(Violation(cid, p) for p in problems)
            if not problems:
                report = audit_consistency(rec.aggregate)
                if not report.feasible:
                    out.append(Violation(
                        cid, "no valence total in 1..12 reproduces the published R band"))
        if rec.composition is not None:
            try:
                rec.composition.check()
                check_normalized(rec.composition.fractions)
            except CompositionError as exc:
                out.append(Violation(cid, str(exc)))
    return out
