"""Hierarchical shifted grid, segment levels, alignment, candidate segments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ZeroLength
from .geometry import H, V, Instance, Rect, Segment


@dataclass(frozen=True)
class GridSpec:
    """Vertical grid lines of level j at ``offset_a + k * eps**(j-2)``.

    The grid is treated as periodic (k ranges over all integers), so every
    level-j line is also a level-(j+1) line.
    """

    eps: Fraction
    offset_a: int = 0
    max_level: int = 8

    def spacing(self, level: int) -> Fraction:
        return Fraction(self.eps) ** (level - 2)


def _floor_to(x, origin, step):
    return origin + math.floor(Fraction(x - origin) / step) * step


def _ceil_to(x, origin, step):
    return origin + math.ceil(Fraction(x - origin) / step) * step


def segment_level(seg: Segment, eps) -> int:
    """Unique ``j >= 0`` with ``|seg|`` in ``(eps**j, eps**(j-1)]``.

    Segments longer than ``1/eps`` are reported as level 0.
    """
    length = Fraction(seg.length)
    if length <= 0:
        raise ZeroLength(f"zero-length segment {seg}")
    eps = Fraction(eps)
    if length > 1 / eps:
        return 0
    j = 0
    while not (eps**j < length):
        j += 1
    return j


def well_align(seg: Segment, eps, grid: GridSpec) -> Segment:
    """Extend both endpoints outward onto the level-(j+3) positions.

    Horizontal endpoints snap to ``a + k*eps**(j+1)``; vertical endpoints
    snap to multiples of ``eps**(j+1)``.
    """
    eps = Fraction(eps)
    j = segment_level(seg, eps)
    step = eps ** (j + 1)
    origin = Fraction(grid.offset_a) if seg.is_horizontal else Fraction(0)
    lo = _floor_to(seg.lo, origin, step)
    hi = _ceil_to(seg.hi, origin, step)
    if lo == seg.lo and hi == seg.hi:
        return seg
    return Segment(seg.orientation, seg.anchor, lo, hi)


def grid_lines_in(region: Rect, level: int, grid: GridSpec, unit=1) -> list:
    """x-coordinates of level-``level`` grid lines strictly inside ``region``.

    ``region`` is measured in steps of ``unit`` (real length); the result is
    in the same units and may contain non-integers.
    """
    unit = Fraction(unit)
    step = grid.spacing(level) / unit
    origin = Fraction(grid.offset_a) / unit
    k = math.floor((region.x1 - origin) / step) + 1
    out = []
    x = origin + k * step
    while x < region.x2:
        if x > region.x1:
            out.append(x.numerator if x.denominator == 1 else x)
        k += 1
        x = origin + k * step
    return out


def integral_grid(eps, offset_a: int, unit) -> Optional[tuple]:
    """``(origin, spacing)`` in grid units of the finest integral grid level.

    Considers every level whose spacing is at least one grid unit and
    returns the finest one whose lines land on integer coordinates, or
    ``None`` if no level does.
    """
    eps, unit = Fraction(eps), Fraction(unit)
    origin = Fraction(offset_a) / unit
    if origin.denominator != 1:
        return None
    best = None
    level = 0
    while True:
        sp = eps ** (level - 2) / unit
        if sp < 1:
            break
        if sp.denominator == 1:
            best = (int(origin) % int(sp), int(sp))
        level += 1
    return best


@dataclass
class CandidateSet:
    horizontal: list
    vertical: list
    provenance: dict = field(default_factory=dict)

    def __iter__(self):
        yield from self.horizontal
        yield from self.vertical

    def __len__(self):
        return len(self.horizontal) + len(self.vertical)

    def all(self) -> list:
        return self.horizontal + self.vertical


def _horizontal_candidates(rects) -> dict:
    out = {}
    anchors = sorted({r.y1 for r in rects} | {r.y2 for r in rects})
    for y in anchors:
        crossing = sorted((r for r in rects if r.y1 <= y <= r.y2), key=lambda r: r.x2)
        for lo in sorted({r.x1 for r in crossing}):
            # grow the span rect by rect; a span is minimal when its leftmost
            # inside rect starts at lo
            inside = [r for r in crossing if r.x1 >= lo]
            left = None
            for k, r in enumerate(inside):
                left = r.x1 if left is None else min(left, r.x1)
                if k + 1 < len(inside) and inside[k + 1].x2 == r.x2:
                    continue
                if left == lo:
                    tag = "rect-edge" if k == 0 else "union-span"
                    out[Segment(H, y, lo, r.x2)] = tag
    return out


def canonical_candidates(inst: Instance) -> CandidateSet:
    """Edge-anchored, union-span candidate segments for both orientations.

    Anchors come from rectangle edges; each span is the exact union of the
    x- (resp. y-) extents of the rectangles it stabs.
    """
    rects = list(inst.rects)
    hmap = _horizontal_candidates(rects)
    vmap = {s.transposed(): t for s, t in
            _horizontal_candidates([r.transposed() for r in rects]).items()}
    prov = dict(hmap)
    prov.update(vmap)
    return CandidateSet(sorted(hmap), sorted(vmap), prov)


def horizontal_candidates(inst: Instance) -> CandidateSet:
    hmap = _horizontal_candidates(list(inst.rects))
    return CandidateSet(sorted(hmap), [], dict(hmap))
