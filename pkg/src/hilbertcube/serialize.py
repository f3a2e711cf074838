"""Exact JSON serialization: rationals as strings, never floats.

Point specs look like {"prefix": ["1", "-1/2"], "tail": "0"}.  Rational
strings are integer or num/den form; decimal literals are rejected so no
reader can quietly lose exactness.  Schedule records carry the source point
and stage count and are rebuilt deterministically on load, with the stored
stage list cross-checked against the rebuild.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .cube import PointRep, make_point
from .errors import ParseError
from .homogeneity import HomeoPlan, PlanCase
from .interior import InteriorMapParams
from .limits import CertifiedPoint, Schedule, build_schedule

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str, where: str = "value") -> Fraction:
    if not isinstance(text, str):
        raise ParseError(f"{where}: rational must be a string, got {type(text).__name__}")
    s = text.strip()
    if not _RATIONAL_RE.match(s):
        raise ParseError(
            f"{where}: {text!r} is not an exact rational (integer or num/den; decimals forbidden)"
        )
    if "/" in s and s.split("/")[1].lstrip("0") == "":
        raise ParseError(f"{where}: zero denominator in {text!r}")
    return Fraction(s)


def format_rational(x) -> str:
    return str(Fraction(x))


def point_from_obj(obj, where: str = "point") -> PointRep:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object with prefix/tail")
    extra = set(obj) - {"prefix", "tail"}
    if extra:
        raise ParseError(f"{where}: unknown fields {sorted(extra)}")
    prefix_obj = obj.get("prefix", [])
    if not isinstance(prefix_obj, list):
        raise ParseError(f"{where}.prefix: expected an array of rational strings")
    prefix = [
        parse_rational(entry, f"{where}.prefix[{i}]") for i, entry in enumerate(prefix_obj)
    ]
    tail = parse_rational(obj.get("tail", "0"), f"{where}.tail")
    return make_point(prefix, tail)


def parse_point_spec(text: str) -> PointRep:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"point spec: invalid JSON at position {e.pos}: {e.msg}") from e
    return point_from_obj(obj)


def point_to_obj(p: PointRep) -> dict:
    return {
        "prefix": [format_rational(c) for c in p.prefix],
        "tail": format_rational(p.tail),
    }


def certified_to_obj(cp: CertifiedPoint) -> dict:
    return {
        "value": point_to_obj(cp.value),
        "radius": format_rational(cp.radius),
        "stages_used": cp.stages_used,
    }


def schedule_to_obj(s: Schedule, source: PointRep) -> dict:
    return {
        "source": point_to_obj(source),
        "count": s.count,
        "stages": [[n, m] for n, m in s.stages],
    }


def schedule_from_obj(obj, where: str = "schedule") -> tuple[Schedule, PointRep]:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    source = point_from_obj(obj.get("source"), f"{where}.source")
    count = obj.get("count")
    if not isinstance(count, int) or count < 0:
        raise ParseError(f"{where}.count: expected a non-negative integer")
    s = build_schedule(source, count)
    stored = obj.get("stages")
    if stored is not None:
        rebuilt = [[n, m] for n, m in s.stages]
        if stored != rebuilt:
            raise ParseError(f"{where}.stages: inconsistent with deterministic rebuild")
    return s, source


def plan_to_obj(plan: HomeoPlan, sources: tuple[PointRep | None, PointRep | None]) -> dict:
    """Serialize a plan.  sources = (p, q) supplies the schedule seeds; pass
    None on a side with no schedule."""
    src, tgt = sources
    return {
        "case": plan.case.value,
        "move": {
            "source_anchor": point_to_obj(plan.move.source),
            "target_anchor": point_to_obj(plan.move.target),
        },
        "source_schedule": None
        if plan.source_schedule is None
        else schedule_to_obj(plan.source_schedule, src),
        "target_schedule": None
        if plan.target_schedule is None
        else schedule_to_obj(plan.target_schedule, tgt),
    }


def plan_from_obj(obj) -> HomeoPlan:
    if not isinstance(obj, dict):
        raise ParseError("plan: expected an object")
    case_tag = obj.get("case")
    try:
        case = PlanCase(case_tag)
    except ValueError:
        raise ParseError(f"plan.case: unknown case {case_tag!r}") from None
    move_obj = obj.get("move")
    if not isinstance(move_obj, dict):
        raise ParseError("plan.move: expected an object with anchors")
    move = InteriorMapParams(
        point_from_obj(move_obj.get("source_anchor"), "plan.move.source_anchor"),
        point_from_obj(move_obj.get("target_anchor"), "plan.move.target_anchor"),
    )
    src_obj = obj.get("source_schedule")
    tgt_obj = obj.get("target_schedule")
    sched_src = None if src_obj is None else schedule_from_obj(src_obj, "plan.source_schedule")[0]
    sched_tgt = None if tgt_obj is None else schedule_from_obj(tgt_obj, "plan.target_schedule")[0]
    wants = {
        PlanCase.INTERIOR_INTERIOR: (False, False),
        PlanCase.BOUNDARY_INTERIOR: (True, False),
        PlanCase.INTERIOR_BOUNDARY: (False, True),
        PlanCase.BOUNDARY_BOUNDARY: (True, True),
    }[case]
    if (sched_src is not None, sched_tgt is not None) != wants:
        raise ParseError(f"plan: schedules present do not match case {case.value!r}")
    return HomeoPlan(case, move, sched_src, sched_tgt)


def parse_plan(text: str) -> HomeoPlan:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"plan: invalid JSON at position {e.pos}: {e.msg}") from e
    return plan_from_obj(obj)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
