"""Seeded instance families.

All randomness comes from ``random.Random(seed)`` (Mersenne Twister
MT19937), so a corpus is a pure function of (family, n, seed, params).
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .errors import BadParams
from .geometry import Instance

FAMILIES = ("uniform", "squares", "tall", "wide", "laminar", "delta_large")


def _uniform(rng, n, extent, max_side):
    out = []
    for _ in range(n):
        w, h = rng.randint(1, max_side), rng.randint(1, max_side)
        x, y = rng.randint(0, extent), rng.randint(0, extent)
        out.append((x, y, x + w, y + h))
    return out


def _squares(rng, n, extent, max_side):
    out = []
    for _ in range(n):
        s = rng.randint(1, max_side)
        x, y = rng.randint(0, extent), rng.randint(0, extent)
        out.append((x, y, x + s, y + s))
    return out


def _tall(rng, n, extent, max_side):
    out = []
    for _ in range(n):
        w = rng.randint(1, max_side)
        h = rng.randint(w, max(w, 2 * max_side))
        x, y = rng.randint(0, extent), rng.randint(0, extent)
        out.append((x, y, x + w, y + h))
    return out


def _wide(rng, n, extent, max_side):
    return [(y1, x1, y2, x2) for x1, y1, x2, y2 in _tall_strict(rng, n, extent, max_side)]


def _tall_strict(rng, n, extent, max_side):
    out = []
    for _ in range(n):
        w = rng.randint(1, max_side)
        h = rng.randint(w + 1, 2 * max_side + 1)
        x, y = rng.randint(0, extent), rng.randint(0, extent)
        out.append((x, y, x + w, y + h))
    return out


def _laminar(rng, n, extent, max_side):
    # x-intervals from recursive splitting; children never touch each other
    intervals = []

    def split(lo, hi):
        if len(intervals) >= n:
            return
        intervals.append((lo, hi))
        if hi - lo < 3:
            return
        if rng.random() < 0.5:
            m = rng.randint(lo + 1, hi - 2)
            split(lo, m)
            split(m + 1, hi)
        else:
            a = rng.randint(lo, hi - 1)
            b = rng.randint(a + 1, hi)
            if (a, b) != (lo, hi):
                split(a, b)

    width = max(4, 2 * extent)
    start = 0
    while len(intervals) < n:
        split(start, start + width)
        start += width + 1
    out = []
    for lo, hi in intervals[:n]:
        y = rng.randint(0, extent)
        out.append((lo, y, hi, y + rng.randint(1, max_side)))
    return out


def _delta_large(rng, n, extent, q, need):
    out = []
    for _ in range(n):
        w, h = rng.randint(1, q), rng.randint(1, q)
        if max(w, h) < need:
            if rng.random() < 0.5:
                w = rng.randint(need, q)
            else:
                h = rng.randint(need, q)
        x, y = rng.randint(0, extent), rng.randint(0, extent)
        out.append((x, y, x + w, y + h))
    return out


def gen(family: str, n: int, seed: int, params: dict | None = None) -> Instance:
    """Generate an instance of ``family`` with ``n`` rectangles.

    Recognised params: ``max_side`` (default 6), ``extent`` (default 2n),
    ``eps`` (default 1/4), and for ``delta_large`` ``delta`` (default 1/2).
    """
    params = dict(params or {})
    if family not in FAMILIES:
        raise BadParams(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if n < 0:
        raise BadParams("n must be non-negative")
    max_side = int(params.get("max_side", 6))
    extent = int(params.get("extent", 2 * max(n, 1)))
    eps = Fraction(params.get("eps", Fraction(1, 4)))
    if max_side < 1 or extent < 0:
        raise BadParams("max_side must be >= 1 and extent >= 0")
    rng = random.Random(seed)
    meta = {"family": family, "n": n, "seed": seed}
    grid_unit = Fraction(1)
    if family == "delta_large":
        delta = Fraction(params.get("delta", Fraction(1, 2)))
        if not 0 < delta <= 1:
            raise BadParams(f"delta={delta} must lie in (0, 1]")
        q = math.lcm(8, delta.denominator)
        grid_unit = Fraction(1, q)
        boxes = _delta_large(rng, n, int(params.get("extent", 3 * max(n, 1))) * q // 8,
                             q, int(delta * q))
        meta["delta"] = str(delta)
    else:
        boxes = {"uniform": _uniform, "squares": _squares, "tall": _tall,
                 "wide": _wide, "laminar": _laminar}[family](rng, n, extent, max_side)
    return Instance.from_boxes(boxes, grid_unit=grid_unit, epsilon=eps, meta=meta)


def is_laminar(inst: Instance) -> bool:
    """x-projections pairwise nest or are disjoint (closed intervals)."""
    iv = [(r.x1, r.x2) for r in inst.rects]
    for i, (a1, a2) in enumerate(iv):
        for b1, b2 in iv[i + 1:]:
            nest = (a1 <= b1 and b2 <= a2) or (b1 <= a1 and a2 <= b2)
            disjoint = a2 < b1 or b2 < a1
            if not (nest or disjoint):
                return False
    return True
