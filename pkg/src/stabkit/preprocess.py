"""Instance normalization (scaling, discretization, stretching) and its inverse.

Normalized instances live on the grid ``eps/n``: every coordinate is an
integer count of that unit.  ``n`` is the size of the instance handed to the
first normalization; it is remembered in ``meta['norm_n']`` so that
normalizing a normalized instance is a no-op.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import EpsilonInvalid, OrientationViolation, RecordMismatch, SideTooLong
from .geometry import (
    H, Instance, Rect, Segment, Solution, hseg, segment_inside, stabs,
)


def check_eps(eps, upper=Fraction(1, 3)) -> Fraction:
    eps = Fraction(eps)
    if not (0 < eps < upper) or (1 / eps).denominator != 1:
        raise EpsilonInvalid(f"eps={eps} must lie in (0, {upper}) with 1/eps integral")
    return eps


def _floor_div(x: Fraction, unit: Fraction) -> int:
    return math.floor(x / unit)


def _ceil_div(x: Fraction, unit: Fraction) -> int:
    return math.ceil(x / unit)


@dataclass
class AxisMap:
    """Monotone map between original and normalized coordinates on one axis.

    ``breaks`` holds ``(original, normalized)`` real-valued pairs before the
    final outward rounding; the inverse interpolates linearly between them.
    """

    breaks: list
    slope: Fraction = Fraction(1)

    def inverse(self, v) -> Fraction:
        v = Fraction(v)
        br = self.breaks
        if not br:
            return v / self.slope
        if v <= br[0][1]:
            return br[0][0] + (v - br[0][1]) / self.slope
        for (o1, n1), (o2, n2) in zip(br, br[1:]):
            if n1 <= v <= n2:
                if n2 == n1:
                    return o1
                return o1 + (v - n1) * (o2 - o1) / (n2 - n1)
        return br[-1][0] + (v - br[-1][1]) / self.slope


@dataclass
class NormalizationRecord:
    scale_x: Fraction
    scale_y: Fraction
    x_shift: Fraction
    y_gap_compressions: list = field(default_factory=list)
    x_gap_compressions: list = field(default_factory=list)
    dropped_thin_rects: list = field(default_factory=list)
    greedy_thin_cost: int = 0
    thin_segments: list = field(default_factory=list)
    original: Optional[Instance] = None
    normalized: Optional[Instance] = None
    kept_ids: tuple = ()
    x_map: Optional[AxisMap] = None
    y_map: Optional[AxisMap] = None

    @property
    def is_identity(self) -> bool:
        return (self.scale_x == 1 and self.scale_y == 1 and self.x_shift == 0
                and not self.y_gap_compressions and not self.x_gap_compressions
                and not self.dropped_thin_rects
                and self.original.grid_unit == self.normalized.grid_unit)


def _pack_components(lo_hi: list, unit: Fraction):
    """Shift the x-connected groups of intervals so consecutive groups sit
    exactly one ``unit`` apart, starting at 0.

    ``lo_hi`` holds real ``(lo, hi)`` pairs.  Returns the per-interval shift
    and the list of changed gaps ``(orig_lo, orig_hi, new_len)``.
    """
    order = sorted(range(len(lo_hi)), key=lambda i: lo_hi[i])
    groups = []
    for i in order:
        lo, hi = lo_hi[i]
        if groups and lo <= groups[-1][1]:
            groups[-1][1] = max(groups[-1][1], hi)
            groups[-1][2].append(i)
        else:
            groups.append([lo, hi, [i]])
    shifts = [Fraction(0)] * len(lo_hi)
    gaps = []
    cursor = Fraction(0)
    prev_end = None
    for lo, hi, members in groups:
        shift = cursor - _floor_div(lo, unit) * unit
        for i in members:
            shifts[i] = shift
        if prev_end is not None:
            new_len = lo + shift - (prev_end[1])
            if prev_end[0] != lo - new_len:
                gaps.append((prev_end[0], lo, new_len))
        end = _ceil_div(hi + shift, unit) * unit
        prev_end = (hi, hi + shift)
        cursor = end + unit
    return shifts, gaps


def _breaks(pairs) -> list:
    seen = {}
    for o, nv in pairs:
        seen.setdefault(o, nv)
    return sorted(seen.items())


def normalize_tall(inst: Instance, eps) -> tuple:
    """Scale, discretize and stretch a tall instance onto the ``eps/n`` grid.

    Returns ``(normalized_instance, record)``.  Rectangles narrower than
    ``eps/n`` after scaling are removed and stabbed by their own minimal
    horizontal segment (kept in the record).
    """
    eps = check_eps(eps)
    bad = [r.id for r in inst.rects if not r.is_tall]
    if bad:
        raise OrientationViolation(f"rects {bad} have height < width")
    n = inst.meta.get("norm_n", inst.n)
    unit = eps / n if n else Fraction(1)
    g = inst.grid_unit
    if inst.n == 0:
        out = Instance((), unit, eps, meta={"norm_n": n})
        return out, NormalizationRecord(Fraction(1), Fraction(1), Fraction(0),
                                        original=inst, normalized=out)
    max_w = max(r.width for r in inst.rects) * g
    # already on the target grid with admissible widths: keep the scale so
    # that a second pass is a no-op (outward rounding may push widths past 1-2eps)
    on_grid = "norm_n" in inst.meta and g == unit
    s = Fraction(1) if on_grid and max_w <= 1 else (1 - 2 * eps) / max_w

    kept, thin = [], []
    for r in inst.rects:
        (thin if r.width * g * s < unit else kept).append(r)
    thin_segs = [hseg(r.y1, r.x1, r.x2) for r in thin]

    xs = [(r.x1 * g * s, r.x2 * g * s) for r in kept]
    shifts, x_gaps = _pack_components(xs, unit)
    x_norm = [(lo + sh, hi + sh) for (lo, hi), sh in zip(xs, shifts)]

    # y: translate to 0 and compress consecutive gaps wider than 2n
    ys = sorted({v for r in kept for v in (r.y1 * g * s, r.y2 * g * s)})
    limit = 2 * n
    target = limit - unit
    base = _floor_div(ys[0], unit) * unit if ys else Fraction(0)
    y_of = {}
    y_gaps = []
    reduction = Fraction(0)
    for k, v in enumerate(ys):
        if k:
            d = v - ys[k - 1]
            if d > limit:
                reduction += d - target
                y_gaps.append((ys[k - 1], v, target))
        y_of[v] = v - base - reduction

    rects = []
    for k, (r, (xl, xh)) in enumerate(zip(kept, x_norm)):
        x1, x2 = _floor_div(xl, unit), _ceil_div(xh, unit)
        y1 = _floor_div(y_of[r.y1 * g * s], unit)
        y2 = _ceil_div(y_of[r.y2 * g * s], unit)
        if y2 - y1 < x2 - x1:
            y2 = y1 + (x2 - x1)
        rects.append(Rect(x1, y1, x2, y2, k))
    out = Instance(tuple(rects), unit, eps, meta={"norm_n": n})

    x_map = AxisMap(_breaks([(r.x1, xl / unit) for r, (xl, _) in zip(kept, x_norm)]
                            + [(r.x2, xh / unit) for r, (_, xh) in zip(kept, x_norm)]),
                    slope=g * s / unit)
    y_map = AxisMap(_breaks([(r.y1, y_of[r.y1 * g * s] / unit) for r in kept]
                            + [(r.y2, y_of[r.y2 * g * s] / unit) for r in kept]),
                    slope=g * s / unit)
    rec = NormalizationRecord(
        scale_x=s, scale_y=s, x_shift=shifts[0] if shifts else Fraction(0),
        y_gap_compressions=y_gaps, x_gap_compressions=x_gaps,
        dropped_thin_rects=thin, greedy_thin_cost=sum(sg.length for sg in thin_segs),
        thin_segments=thin_segs, original=inst, normalized=out,
        kept_ids=tuple(r.id for r in kept), x_map=x_map, y_map=y_map)
    return out, rec


def normalize_general(inst: Instance, eps) -> tuple:
    """Discretize a unit-bounded instance onto the ``eps/n`` grid in both axes.

    Rectangles are extended outward to grid multiples; x- and y-connected
    groups are packed one grid unit apart so all coordinates stay in
    ``[0, n]``.
    """
    eps = check_eps(eps)
    g = inst.grid_unit
    n = inst.meta.get("norm_n", inst.n)
    unit = eps / n if n else Fraction(1)
    # outward rounding of an earlier pass may have added up to 2 grid units
    limit = 1 + 2 * unit if "norm_n" in inst.meta and g == unit else 1
    long_ = [r.id for r in inst.rects if r.width * g > limit or r.height * g > limit]
    if long_:
        raise SideTooLong(f"rects {long_} have a side longer than 1")
    if inst.n == 0:
        out = Instance((), unit, eps, meta={"norm_n": n})
        return out, NormalizationRecord(Fraction(1), Fraction(1), Fraction(0),
                                        original=inst, normalized=out)
    xs = [(r.x1 * g, r.x2 * g) for r in inst.rects]
    ys = [(r.y1 * g, r.y2 * g) for r in inst.rects]
    xsh, x_gaps = _pack_components(xs, unit)
    ysh, y_gaps = _pack_components(ys, unit)
    rects = []
    for k, ((xl, xh), (yl, yh)) in enumerate(zip(xs, ys)):
        rects.append(Rect(_floor_div(xl + xsh[k], unit), _floor_div(yl + ysh[k], unit),
                          _ceil_div(xh + xsh[k], unit), _ceil_div(yh + ysh[k], unit), k))
    out = Instance(tuple(rects), unit, eps, meta={"norm_n": n})
    rs = inst.rects
    x_map = AxisMap(_breaks([(rs[k].x1, (xl + xsh[k]) / unit) for k, (xl, _) in enumerate(xs)]
                            + [(rs[k].x2, (xh + xsh[k]) / unit) for k, (_, xh) in enumerate(xs)]),
                    slope=g / unit)
    y_map = AxisMap(_breaks([(rs[k].y1, (yl + ysh[k]) / unit) for k, (yl, _) in enumerate(ys)]
                            + [(rs[k].y2, (yh + ysh[k]) / unit) for k, (_, yh) in enumerate(ys)]),
                    slope=g / unit)
    rec = NormalizationRecord(
        scale_x=Fraction(1), scale_y=Fraction(1), x_shift=xsh[0],
        y_gap_compressions=y_gaps, x_gap_compressions=x_gaps,
        original=inst, normalized=out, kept_ids=tuple(range(inst.n)),
        x_map=x_map, y_map=y_map)
    return out, rec


def split_long_segments(sol: Solution, eps, max_rect_extent: int) -> Solution:
    """Cut every segment longer than ``max_rect_extent / eps`` into pieces.

    Pieces start every ``(1/eps - 2) * E`` units and reach ``E`` further into
    the next piece, so any rectangle of extent at most ``E`` stabbed by the
    original segment lies entirely inside one piece.
    """
    eps = check_eps(eps, upper=Fraction(1, 2))
    ext = max_rect_extent
    inv = int(1 / eps)
    step = (inv - 2) * ext
    out = []
    for seg in sol.segments:
        if seg.length * eps <= ext:
            out.append(seg)
            continue
        k = (seg.length - ext) // step + 1
        for i in range(k):
            lo = seg.lo + i * step
            out.append(Segment(seg.orientation, seg.anchor, lo, min(lo + step + ext, seg.hi)))
    return Solution.of(out, sol.solver_tag)


def _interval_groups(rects: list, horizontal: bool) -> list:
    """Minimum point-stabbing of the anchor-axis intervals (earliest end first)."""
    key = (lambda r: (r.y2, r.y1)) if horizontal else (lambda r: (r.x2, r.x1))
    pending = sorted(rects, key=key)
    groups = []
    while pending:
        p = pending[0].y2 if horizontal else pending[0].x2
        grp = [r for r in pending if (r.y1 if horizontal else r.x1) <= p]
        pending = [r for r in pending if r not in grp]
        groups.append((p, grp))
    return groups


def repair_segment(seg_rects: list, horizontal: bool) -> list:
    """Fewest same-orientation segments stabbing every rect in ``seg_rects``."""
    out = []
    for p, grp in _interval_groups(seg_rects, horizontal):
        if horizontal:
            out.append(Segment(H, p, min(r.x1 for r in grp), max(r.x2 for r in grp)))
        else:
            out.append(Segment(H.other, p, min(r.y1 for r in grp), max(r.y2 for r in grp)))
    return out


def _as_int(v: Fraction):
    return v.numerator if v.denominator == 1 else None


def denormalize(sol: Solution, rec: NormalizationRecord) -> Solution:
    """Map a normalized solution back onto the original instance.

    Coordinates go through the inverse axis maps; a mapped segment that is
    not integral or no longer stabs every original rectangle its normalized
    form stabbed is rebuilt from those rectangles.  Thin-rectangle segments
    are appended.
    """
    norm, orig = rec.normalized, rec.original
    for s in sol.segments:
        if norm.bounds is None or not segment_inside(s, norm.bounds):
            raise RecordMismatch(f"{s} lies outside the normalized instance")
    out = []
    for s in sol.segments:
        hit = [orig.rects[rec.kept_ids[r.id]] for r in norm.rects if stabs(s, r)]
        if not hit:
            continue
        if s.is_horizontal:
            a, lo, hi = rec.y_map.inverse(s.anchor), rec.x_map.inverse(s.lo), rec.x_map.inverse(s.hi)
        else:
            a, lo, hi = rec.x_map.inverse(s.anchor), rec.y_map.inverse(s.lo), rec.y_map.inverse(s.hi)
        a, lo, hi = _as_int(a), _as_int(lo), _as_int(hi)
        if None not in (a, lo, hi):
            mapped = Segment(s.orientation, a, lo, hi)
            if all(stabs(mapped, r) for r in hit) and (
                    orig.bounds is not None and segment_inside(mapped, orig.bounds)):
                out.append(mapped)
                continue
        out.extend(repair_segment(hit, s.is_horizontal))
    out.extend(rec.thin_segments)
    return Solution.of(out, sol.solver_tag)


def split_components(inst: Instance, axis: str = "x") -> list:
    """Sub-instances separated by coordinates that no rectangle covers.

    Rectangles sharing only a boundary coordinate stay together (closed
    intervals).  Each part is an ``Instance.subset`` and keeps the
    original ids in ``meta['parent_ids']``.
    """
    key = (lambda r: (r.x1, r.x2)) if axis == "x" else (lambda r: (r.y1, r.y2))
    groups = []
    for r in sorted(inst.rects, key=key):
        lo, hi = key(r)
        if groups and lo <= groups[-1][0]:
            groups[-1][0] = max(groups[-1][0], hi)
            groups[-1][1].append(r.id)
        else:
            groups.append([hi, [r.id]])
    return [inst.subset(ids) for _, ids in groups]
