"""Exact geometric primitives: rectangles, segments, stabbing, verification.

Instance coordinates are plain integers counted in multiples of
``Instance.grid_unit``.  Analysis helpers elsewhere also accept
``fractions.Fraction`` coordinates; nothing here ever rounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import SegmentOutOfBounds

INT64_MAX = 2**63 - 1


class Orientation(str, enum.Enum):
    H = "h"
    V = "v"

    @property
    def other(self) -> "Orientation":
        return Orientation.V if self is Orientation.H else Orientation.H


H = Orientation.H
V = Orientation.V


@dataclass(frozen=True)
class Rect:
    """Closed axis-parallel rectangle ``[x1, x2] x [y1, y2]``."""

    x1: int
    y1: int
    x2: int
    y2: int
    id: int = 0

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"degenerate rectangle {self!r}")

    @property
    def width(self):
        return self.x2 - self.x1

    @property
    def height(self):
        return self.y2 - self.y1

    @property
    def is_tall(self) -> bool:
        return self.height >= self.width

    def contains(self, other: "Rect") -> bool:
        return (self.x1 <= other.x1 and other.x2 <= self.x2
                and self.y1 <= other.y1 and other.y2 <= self.y2)

    def transposed(self) -> "Rect":
        return Rect(self.y1, self.x1, self.y2, self.x2, self.id)

    def with_id(self, new_id: int) -> "Rect":
        return Rect(self.x1, self.y1, self.x2, self.y2, new_id)


@dataclass(frozen=True, order=True)
class Segment:
    """Horizontal (anchor = y, span in x) or vertical (anchor = x, span in y)."""

    orientation: Orientation
    anchor: int
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"segment with lo > hi: {self!r}")

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def is_horizontal(self) -> bool:
        return self.orientation is H

    def transposed(self) -> "Segment":
        return Segment(self.orientation.other, self.anchor, self.lo, self.hi)

    def endpoints(self):
        if self.is_horizontal:
            return (self.lo, self.anchor), (self.hi, self.anchor)
        return (self.anchor, self.lo), (self.anchor, self.hi)


def hseg(anchor, lo, hi) -> Segment:
    return Segment(H, anchor, lo, hi)


def vseg(anchor, lo, hi) -> Segment:
    return Segment(V, anchor, lo, hi)


def bounding_box(rects: Iterable[Rect]) -> Optional[Rect]:
    rects = list(rects)
    if not rects:
        return None
    return Rect(min(r.x1 for r in rects), min(r.y1 for r in rects),
                max(r.x2 for r in rects), max(r.y2 for r in rects), -1)


@dataclass(frozen=True)
class Instance:
    """A set of rectangles with a common grid unit.

    ``grid_unit`` is the real length of one coordinate step; ``epsilon``
    is the accuracy parameter (its reciprocal must be a natural number).
    Rect ids are dense ``0..n-1`` in list order.
    """

    rects: tuple
    grid_unit: Fraction = Fraction(1)
    epsilon: Fraction = Fraction(1, 4)
    bounds: Optional[Rect] = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        rects = tuple(self.rects)
        object.__setattr__(self, "rects", rects)
        object.__setattr__(self, "grid_unit", Fraction(self.grid_unit))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        for i, r in enumerate(rects):
            if r.id != i:
                raise ValueError(f"rect ids must be dense 0..n-1 (got {r.id} at {i})")
            for v in (r.x1, r.y1, r.x2, r.y2):
                if not isinstance(v, int) or abs(v) > INT64_MAX:
                    raise ValueError(f"coordinate {v!r} is not a 64-bit integer")
        if self.bounds is None:
            object.__setattr__(self, "bounds", bounding_box(rects))
        elif rects and not all(self.bounds.contains(r) for r in rects):
            raise ValueError("bounds do not enclose every rectangle")

    @classmethod
    def from_boxes(cls, boxes: Iterable[Sequence[int]], **kwargs) -> "Instance":
        """Build an instance from ``(x1, y1, x2, y2)`` tuples, assigning ids."""
        return cls(tuple(Rect(*map(int, b), id=i) for i, b in enumerate(boxes)), **kwargs)

    @property
    def n(self) -> int:
        return len(self.rects)

    def subset(self, ids: Iterable[int]) -> "Instance":
        """Sub-instance on the given rect ids (renumbered densely, order kept).

        The original ids are kept in ``meta['parent_ids']``.
        """
        ids = sorted(ids)
        rects = tuple(self.rects[i].with_id(k) for k, i in enumerate(ids))
        return Instance(rects, self.grid_unit, self.epsilon,
                        meta={"parent_ids": tuple(ids)})

    def transposed(self) -> "Instance":
        return Instance(tuple(r.transposed() for r in self.rects), self.grid_unit,
                        self.epsilon, meta=dict(self.meta))

    def real(self, value) -> Fraction:
        """Convert a grid-unit quantity to real units."""
        return value * self.grid_unit


@dataclass(frozen=True)
class Solution:
    segments: tuple
    cost: int
    solver_tag: str = ""

    @classmethod
    def of(cls, segments: Iterable[Segment], solver_tag: str = "") -> "Solution":
        segments = tuple(segments)
        return cls(segments, sum(s.length for s in segments), solver_tag)

    def __len__(self):
        return len(self.segments)

    def tagged(self, solver_tag: str) -> "Solution":
        return Solution(self.segments, self.cost, solver_tag)

    def transposed(self) -> "Solution":
        return Solution(tuple(s.transposed() for s in self.segments), self.cost,
                        self.solver_tag)

    def union(self, *others: "Solution", solver_tag: Optional[str] = None) -> "Solution":
        segs = list(self.segments)
        for o in others:
            segs.extend(o.segments)
        return Solution.of(segs, self.solver_tag if solver_tag is None else solver_tag)

    @property
    def has_vertical(self) -> bool:
        return any(not s.is_horizontal for s in self.segments)


def stabs(seg: Segment, r: Rect) -> bool:
    """Closed stabbing test: the segment crosses ``r`` fully in one dimension."""
    if seg.orientation is H:
        return r.y1 <= seg.anchor <= r.y2 and seg.lo <= r.x1 and seg.hi >= r.x2
    return r.x1 <= seg.anchor <= r.x2 and seg.lo <= r.y1 and seg.hi >= r.y2


def stab_mask(seg: Segment, rects: Sequence[Rect]) -> int:
    """Bitmask (over list positions) of the rectangles stabbed by ``seg``."""
    mask = 0
    a, lo, hi = seg.anchor, seg.lo, seg.hi
    if seg.orientation is H:
        for i, r in enumerate(rects):
            if r.y1 <= a <= r.y2 and lo <= r.x1 and hi >= r.x2:
                mask |= 1 << i
    else:
        for i, r in enumerate(rects):
            if r.x1 <= a <= r.x2 and lo <= r.y1 and hi >= r.y2:
                mask |= 1 << i
    return mask


def segment_inside(seg: Segment, region: Rect) -> bool:
    if seg.is_horizontal:
        return region.y1 <= seg.anchor <= region.y2 and region.x1 <= seg.lo and seg.hi <= region.x2
    return region.x1 <= seg.anchor <= region.x2 and region.y1 <= seg.lo and seg.hi <= region.y2


def clip_segment(seg: Segment, region: Rect) -> Optional[Segment]:
    """Intersection of a segment with a closed region (may be zero-length)."""
    if seg.orientation is H:
        a_lo, a_hi, s_lo, s_hi = region.y1, region.y2, region.x1, region.x2
    else:
        a_lo, a_hi, s_lo, s_hi = region.x1, region.x2, region.y1, region.y2
    if not a_lo <= seg.anchor <= a_hi:
        return None
    lo, hi = max(seg.lo, s_lo), min(seg.hi, s_hi)
    if lo > hi:
        return None
    if lo == seg.lo and hi == seg.hi:
        return seg
    return Segment(seg.orientation, seg.anchor, lo, hi)


class Verdict(NamedTuple):
    feasible: bool
    unstabbed: list
    recomputed_cost: int


def verify(inst: Instance, sol: Solution) -> Verdict:
    """Check that every rectangle is stabbed; recompute the exact cost."""
    for s in sol.segments:
        if inst.bounds is None or not segment_inside(s, inst.bounds):
            raise SegmentOutOfBounds(f"{s} leaves instance bounds {inst.bounds}")
    unstabbed = [r.id for r in inst.rects if not any(stabs(s, r) for s in sol.segments)]
    cost = sum(s.length for s in sol.segments)
    return Verdict(not unstabbed, unstabbed, cost)


def min_stab(r: Rect) -> Segment:
    """Cheapest single segment stabbing ``r``: across its shorter side."""
    if r.width <= r.height:
        return hseg(r.y1, r.x1, r.x2)
    return vseg(r.x1, r.y1, r.y2)
