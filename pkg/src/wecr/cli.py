"""``wecr`` command line entry point.

Exit codes: 0 success, 1 audit found an inconsistent row, 2 bad input,
3 degenerate computation (zero entropy).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from wecr.core import assess_component
from wecr.db import (
    ComponentDatabase,
    audit_consistency,
    default_database_path,
    load_database,
    parse_component,
    validate_database,
)
from wecr.detections import bind_detections, parse_detections
from wecr.errors import CompositionError, WecrError, ZeroEntropyError
from wecr.planner import PlannerConfig, ScoreMode, build_plan
from wecr.report import (
    map_rows,
    render_map_csv,
    render_map_svg,
    render_plan_json,
    render_plan_table,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


class InputError(Exception):
    pass


def resolve_db_path(explicit: str | None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get("WECR_DB")
    if env:
        return Path(env)
    return default_database_path()


def _load_db(explicit: str | None) -> ComponentDatabase:
    path = resolve_db_path(explicit)
    try:
        return load_database(path)
    except OSError as exc:
        raise InputError(f"cannot read database {path}: {exc.strerror or exc}") from None
    except WecrError as exc:
        raise InputError(f"{path}: {exc}") from None


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {getattr(exc, 'strerror', None) or exc}") from None


def cmd_assess(args, out) -> int:
    text = _read_text(args.file)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.file}: line {exc.lineno}: {exc.msg}") from None
    try:
        rec = parse_component(obj)
    except WecrError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    if rec.composition is None:
        raise InputError(f"{args.file}: component has no composition")
    try:
        res = assess_component(rec.composition)
    except ZeroEntropyError:
        print(f"{args.file}: single-material composition has zero entropy; "
              "recyclability is undefined", file=sys.stderr)
        return EXIT_DEGENERATE
    except (CompositionError, ValueError) as exc:
        raise InputError(f"{args.file}: {exc}") from None

    out.write(f"H={res.entropy_bits:.4f} D={res.grade:.4f} "
              f"R={res.recyclability:.4f} zone={res.zone.value}\n")
    out.write(json.dumps({
        "component_id": rec.component_id,
        "entropy_bits": res.entropy_bits,
        "grade": res.grade,
        "recyclability": res.recyclability,
        "zone": res.zone.value,
    }) + "\n")
    return EXIT_OK


def cmd_audit(args, out) -> int:
    db = _load_db(args.db)
    n_feasible = n_rows = 0
    for rec in db:
        if rec.aggregate is None:
            continue
        n_rows += 1
        rep = audit_consistency(rec.aggregate)
        n_feasible += rep.feasible
        status = "feasible" if rep.feasible else "INFEASIBLE"
        ns = ",".join(str(n) for n in rep.feasible_n) or "-"
        out.write(f"{rec.component_id:<20} {status:<10} N={ns:<20} "
                  f"N_est={rep.n_est:.4f} (~{rep.n_est_rounded})\n")
    violations = validate_database(db)
    for v in violations:
        out.write(f"violation: {v}\n")
    out.write(f"{n_feasible}/{n_rows} aggregates feasible\n")
    return EXIT_INFEASIBLE if violations else EXIT_OK


def cmd_plan(args, out) -> int:
    text = _read_text(args.detections)
    db = _load_db(args.db)
    try:
        dets = parse_detections(text)
        cfg = PlannerConfig(
            recovery_threshold=args.threshold,
            confidence_floor=args.confidence_floor,
            score_mode=ScoreMode(args.score_mode),
        )
    except (WecrError, ValueError) as exc:
        raise InputError(f"{args.detections}: {exc}") from None

    bound, unbound = bind_detections(dets, db)
    plans = build_plan(bound, unbound, cfg)
    doc = render_plan_json(plans, cfg)
    if args.json_out:
        try:
            Path(args.json_out).write_text(doc, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {args.json_out}: {exc.strerror or exc}") from None
    else:
        out.write(doc)
        out.write("\n")
    out.write(render_plan_table(plans))
    return EXIT_OK


def cmd_map(args, out) -> int:
    db = _load_db(args.db)
    rows = map_rows(db)
    target = Path(args.out)
    outputs = []
    if args.format in ("csv", "both"):
        path = target if args.format == "csv" else target.with_suffix(".csv")
        outputs.append((path, render_map_csv(rows)))
    if args.format in ("svg", "both"):
        path = target if args.format == "svg" else target.with_suffix(".svg")
        outputs.append((path, render_map_svg(rows)))
    for path, content in outputs:
        try:
            path.write_text(content, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None
        out.write(f"wrote {path} ({len(rows)} components)\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wecr",
        description="Recyclability of waste electronic components and disassembly planning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="compute H, D, R and zone for one composition file")
    p.add_argument("file", help="JSON component object with a composition")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("audit", help="check every aggregate row for internal consistency")
    p.add_argument("--db", help="component database (default: $WECR_DB or bundled)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("plan", help="build pick plans from a detections file")
    p.add_argument("detections", help="JSON-lines detections file, or - for stdin")
    p.add_argument("--db", help="component database (default: $WECR_DB or bundled)")
    p.add_argument("--threshold", type=float, default=PlannerConfig.recovery_threshold,
                   help="recovery threshold in R units (default %(default)s)")
    p.add_argument("--confidence-floor", type=float, default=PlannerConfig.confidence_floor,
                   help="drop detections below this confidence (default %(default)s)")
    p.add_argument("--score-mode", choices=[m.value for m in ScoreMode],
                   default=PlannerConfig.score_mode.value)
    p.add_argument("--json-out", help="write the plan JSON here instead of stdout")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("map", help="write the recyclability map as CSV and/or SVG")
    p.add_argument("--db", help="component database (default: $WECR_DB or bundled)")
    p.add_argument("--out", required=True, help="output path")
    p.add_argument("--format", choices=["csv", "svg", "both"], default="csv",
                   help="with 'both', the .csv and .svg suffixes are applied to --out")
    p.set_defaults(func=cmd_map)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except InputError as exc:
        print(f"wecr {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
