"""JSON instance/solution files with exact rational coordinates.

Coordinates are written in real units as ``"p/q"`` strings (plain integers
when the denominator is 1).  An optional ``grid_unit`` field fixes the
coordinate step; otherwise it is ``1 / lcm`` of all denominators.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .errors import ParseError
from .geometry import Instance, Orientation, Rect, Segment, Solution

SCHEMA_VERSION = "1"


def rat(v) -> str:
    return str(Fraction(v))


def parse_rat(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ParseError(f"{where}: expected an integer or 'p/q' string, got {v!r}")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"{where}: bad rational {v!r} ({e})") from None


def _to_units(v: Fraction, unit: Fraction, where: str) -> int:
    q = v / unit
    if q.denominator != 1:
        raise ParseError(f"{where}: {v} is not a multiple of grid_unit {unit}")
    return q.numerator


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return rat(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def instance_to_dict(inst: Instance) -> dict:
    g = inst.grid_unit
    return {
        "schema_version": SCHEMA_VERSION,
        "epsilon": rat(inst.epsilon),
        "grid_unit": rat(g),
        "rects": [{"x1": rat(r.x1 * g), "y1": rat(r.y1 * g),
                   "x2": rat(r.x2 * g), "y2": rat(r.y2 * g)} for r in inst.rects],
        "meta": _jsonable(inst.meta),
    }


def dump_instance(inst: Instance) -> str:
    return dumps(instance_to_dict(inst))


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{what}: line {e.lineno} column {e.colno}: {e.msg}") from None


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise ParseError("instance: top level must be an object")
    for key in ("schema_version", "epsilon", "rects"):
        if key not in data:
            raise ParseError(f"instance: missing field {key!r}")
    if str(data["schema_version"]) != SCHEMA_VERSION:
        raise ParseError(f"schema_version: unsupported {data['schema_version']!r}")
    eps = parse_rat(data["epsilon"], "epsilon")
    if not isinstance(data["rects"], list):
        raise ParseError("rects: expected a list")
    raw = []
    for i, r in enumerate(data["rects"]):
        if not isinstance(r, dict):
            raise ParseError(f"rects[{i}]: expected an object")
        vals = []
        for k in ("x1", "y1", "x2", "y2"):
            if k not in r:
                raise ParseError(f"rects[{i}].{k}: missing")
            vals.append(parse_rat(r[k], f"rects[{i}].{k}"))
        if not (vals[0] < vals[2] and vals[1] < vals[3]):
            raise ParseError(f"rects[{i}]: need x1 < x2 and y1 < y2")
        raw.append(vals)
    if "grid_unit" in data:
        unit = parse_rat(data["grid_unit"], "grid_unit")
        if unit <= 0:
            raise ParseError("grid_unit: must be positive")
    else:
        unit = Fraction(1, math.lcm(1, *(v.denominator for vals in raw for v in vals)))
    rects = tuple(Rect(*(_to_units(v, unit, f"rects[{i}].{k}")
                         for v, k in zip(vals, ("x1", "y1", "x2", "y2"))), id=i)
                  for i, vals in enumerate(raw))
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise ParseError("meta: expected an object")
    try:
        return Instance(rects, unit, eps, meta=meta)
    except ValueError as e:
        raise ParseError(f"instance: {e}") from None


def load_instance(text: str) -> Instance:
    return instance_from_dict(_load_json(text, "instance"))


def solution_to_dict(sol: Solution, grid_unit) -> dict:
    g = Fraction(grid_unit)
    return {
        "solver_tag": sol.solver_tag,
        "cost": rat(sol.cost * g),
        "segments": [{"orientation": s.orientation.value, "anchor": rat(s.anchor * g),
                      "lo": rat(s.lo * g), "hi": rat(s.hi * g)} for s in sol.segments],
    }


def dump_solution(sol: Solution, grid_unit) -> str:
    return dumps(solution_to_dict(sol, grid_unit))


def load_solution(text: str, grid_unit) -> Solution:
    data = _load_json(text, "solution")
    g = Fraction(grid_unit)
    if not isinstance(data, dict) or not isinstance(data.get("segments"), list):
        raise ParseError("solution: expected an object with a 'segments' list")
    segs = []
    for i, s in enumerate(data["segments"]):
        where = f"segments[{i}]"
        if not isinstance(s, dict):
            raise ParseError(f"{where}: expected an object")
        try:
            o = Orientation(s.get("orientation"))
        except ValueError:
            raise ParseError(f"{where}.orientation: expected 'h' or 'v'") from None
        vals = []
        for k in ("anchor", "lo", "hi"):
            if k not in s:
                raise ParseError(f"{where}.{k}: missing")
            vals.append(_to_units(parse_rat(s[k], f"{where}.{k}"), g, f"{where}.{k}"))
        if vals[1] > vals[2]:
            raise ParseError(f"{where}: lo > hi")
        segs.append(Segment(o, *vals))
    return Solution.of(segs, str(data.get("solver_tag", "")))
