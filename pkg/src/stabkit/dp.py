"""Region-splitting dynamic program for HV-stabbing and its reductions.

The DP works on cells (region, carried segments).  At each cell it either
splits along a carried segment that crosses the whole region (trivial
operation), guesses new segments into the carried set (add operation), or
cuts the region with a full line and pays a greedy stabbing of the
rectangles the line meets (line operation).

Cells are explored top-down and only when reachable.  The region of a cell
is the bounding box of its still-unstabbed rectangles, so the value of a
cell depends only on that rectangle set and on which carried segment (if
any) crosses the region; the memo is keyed on exactly that.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .baseline import CoverSystem, greedy_cover, greedy_select
from .candidates import canonical_candidates, horizontal_candidates, integral_grid
from .errors import CapExceeded, Infeasible, MemoOverflow, OrientationViolation, VerticalLeak
from .geometry import H, V, Instance, Rect, Segment, Solution, clip_segment, stabs, verify

DEFAULT_MEMO_CAPACITY = 2_000_000


def _memo_capacity_default() -> int:
    raw = os.environ.get("STABKIT_MEMO_CAP")
    return int(raw) if raw else DEFAULT_MEMO_CAPACITY


@dataclass(frozen=True)
class DpConfig:
    eps: Fraction = Fraction(1, 4)
    add_arity_cap: int = 2
    line_candidate_source: str = "both"  # "grid", "rect_edges" or "both"
    memo_capacity: int = field(default_factory=_memo_capacity_default)
    offset_policy: Union[str, int] = "all"  # "all" or a fixed integer offset
    normalize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.add_arity_cap < 1:
            raise ValueError("add_arity_cap must be >= 1")
        if self.line_candidate_source not in ("grid", "rect_edges", "both"):
            raise ValueError(f"bad line_candidate_source {self.line_candidate_source!r}")
        if self.offset_policy != "all" and not isinstance(self.offset_policy, int):
            raise ValueError(f"bad offset_policy {self.offset_policy!r}")

    @property
    def carried_cap(self) -> int:
        return 3 * self.eps.denominator**3 // self.eps.numerator**3

    def offsets(self) -> list:
        if self.offset_policy == "all":
            return list(range(int(1 / self.eps**2)))
        return [self.offset_policy]


@dataclass
class DpStats:
    cells_expanded: int = 0
    memo_hits: int = 0
    ops_tried: dict = field(default_factory=lambda: {"trivial": 0, "add": 0, "line": 0})
    cap_pruned: int = 0
    best_offset: Optional[int] = None
    offset_costs: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CellKey:
    region: Rect
    carried: tuple

    @classmethod
    def make(cls, region: Rect, carried) -> "CellKey":
        clipped = set()
        for s in carried:
            c = clip_segment(s, region)
            if c is not None and c.length > 0:
                clipped.add(c)
        return cls(region, tuple(sorted(clipped)))

    def splitter(self) -> Optional[Segment]:
        """First carried segment (canonical order) cutting the region in two."""
        r = self.region
        for s in self.carried:
            if s.is_horizontal:
                if r.y1 < s.anchor < r.y2 and s.lo <= r.x1 and s.hi >= r.x2:
                    return s
            elif r.x1 < s.anchor < r.x2 and s.lo <= r.y1 and s.hi >= r.y2:
                return s
        return None


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class _HvDp:
    def __init__(self, inst: Instance, cfg: DpConfig, stats: DpStats, line_cache: dict):
        self.inst = inst
        self.rects = inst.rects
        self.cfg = cfg
        self.stats = stats
        self.line_cache = line_cache
        cs = CoverSystem.build(self.rects, canonical_candidates(inst)).reduced()
        self.sets = cs.sets
        self.covering = [[k for k, (_, m, _) in enumerate(self.sets) if (m >> i) & 1]
                         for i in range(len(self.rects))]
        self.min_side = [min(r.width, r.height) for r in self.rects]
        self.scale = math.lcm(*range(1, len(self.rects) + 1))
        self.cap = cfg.carried_cap
        self.info = {}
        self.bounds = {}
        self.masks = {}
        self.exact = {}
        self.lower = {}
        self.lines = {}
        self.grid = None

    def set_offset(self, offset: int):
        self.exact = {}
        self.lower = {}
        self.lines = {}
        self.grid = None
        if self.cfg.line_candidate_source in ("grid", "both"):
            self.grid = integral_grid(self.cfg.eps, offset, self.inst.grid_unit)

    # -- per-mask data, independent of the grid offset ------------------
    def cell_info(self, live: int) -> tuple:
        """``(bbox, sorted add options)`` for a live set."""
        hit = self.info.get(live)
        if hit is not None:
            return hit
        idx = list(_bits(live))
        rs = [self.rects[i] for i in idx]
        bb = Rect(min(r.x1 for r in rs), min(r.y1 for r in rs),
                  max(r.x2 for r in rs), max(r.y2 for r in rs), -1)
        pivot = min(idx, key=lambda i: (len(self.covering[i]), i))
        opts = []
        for k in self.covering[pivot]:
            seg = clip_segment(self.sets[k][0], bb)
            opts.append((seg.length, seg, self.sets[k][1]))
        opts.sort(key=lambda t: (t[0], t[1]))
        hit = (bb, opts)
        self.info[live] = hit
        return hit

    def lower_bound(self, live: int) -> int:
        hit = self.bounds.get(live)
        if hit is not None:
            return hit
        scale = self.scale
        # share bound: each live rect pays its best weight per newly stabbed rect
        ws = [w * (scale // c) if (c := (m & live).bit_count()) else 0
              for _, m, w in self.sets]
        idx = list(_bits(live))
        lb = max(self.min_side[i] for i in idx)
        share = sum(min(map(ws.__getitem__, self.covering[i])) for i in idx)
        lb = max(lb, -(-share // scale))
        self.bounds[live] = lb
        return lb

    def line_solution(self, crossed: int) -> tuple:
        hit = self.line_cache.get(crossed)
        if hit is None:
            sub = self.inst.subset(_bits(crossed))
            segs = tuple(greedy_select(sub.rects, canonical_candidates(sub)))
            hit = (sum(s.length for s in segs), segs)
            self.line_cache[crossed] = hit
        return hit

    def line_masks(self, coord: int, orient) -> tuple:
        key = (coord, orient)
        hit = self.masks.get(key)
        if hit is None:
            crossed = left = right = 0
            for i, r in enumerate(self.rects):
                lo, hi = (r.x1, r.x2) if orient is V else (r.y1, r.y2)
                if hi < coord:
                    left |= 1 << i
                elif lo > coord:
                    right |= 1 << i
                else:
                    crossed |= 1 << i
            hit = (crossed, left, right)
            self.masks[key] = hit
        return hit

    def grid_line_in_gap(self, lo: int, hi: int) -> Optional[int]:
        if self.grid is None:
            return None
        origin, sp = self.grid
        x = origin + sp * ((lo - origin) // sp + 1)
        return x if x < hi else None

    def line_ops(self, live: int, region: Rect) -> list:
        """Distinct line operations ``(coord, orient, crossed, left, right)``."""
        hit = self.lines.get(live)
        if hit is not None:
            return hit
        src = self.cfg.line_candidate_source
        rs = [self.rects[i] for i in _bits(live)]
        pos = []
        xs = sorted({r.x1 for r in rs} | {r.x2 for r in rs})
        for k, x in enumerate(xs):
            if region.x1 < x < region.x2:
                on_grid = self.grid is not None and (x - self.grid[0]) % self.grid[1] == 0
                if src != "grid" or on_grid:
                    pos.append((x, V))
            if k + 1 < len(xs):
                g = self.grid_line_in_gap(x, xs[k + 1])
                if g is not None:
                    pos.append((g, V))
        for y in sorted({r.y1 for r in rs} | {r.y2 for r in rs}):
            if region.y1 < y < region.y2:
                pos.append((y, H))
        pos.sort(key=lambda t: (t[0], t[1]))
        seen = set()
        out = []
        for coord, orient in pos:
            c, l, r = self.line_masks(coord, orient)
            part = (live & c, live & l, live & r)
            if part in seen:
                continue
            seen.add(part)
            out.append((coord, orient) + part)
        self.lines[live] = out
        return out

    @staticmethod
    def splitter(carried: tuple, bb: Rect) -> Optional[Segment]:
        """Carried segment cutting the region in two, first in canonical order.

        Clipping to the region never changes whether a segment crosses it,
        and the clipped splitters sort by (orientation, anchor).
        """
        best = None
        for s in carried:
            if s.orientation is H:
                ok = bb.y1 < s.anchor < bb.y2 and s.lo <= bb.x1 and s.hi >= bb.x2
            else:
                ok = bb.x1 < s.anchor < bb.x2 and s.lo <= bb.y1 and s.hi >= bb.y2
            if ok and (best is None or (s.orientation, s.anchor) < (best.orientation, best.anchor)):
                best = s
        if best is None:
            return None
        return clip_segment(best, bb)

    def _store(self, mkey, value, segs, ub):
        if segs is not None and value < ub:
            self.exact[mkey] = (value, segs)
        else:
            self.lower[mkey] = max(self.lower.get(mkey, 0), value)
        if len(self.exact) + len(self.lower) > self.cfg.memo_capacity:
            raise MemoOverflow(f"memo exceeded {self.cfg.memo_capacity} cells", self.stats)

    # -- the recursion -------------------------------------------------
    def solve(self, live: int, carried: tuple, ub) -> tuple:
        """Return ``(value, segments)`` if the cell can be solved below ``ub``,
        else ``(lower_bound, None)`` with ``lower_bound >= ub``.

        ``carried`` may hold segments extending past the region; only their
        part inside the region matters.
        """
        if live == 0:
            return 0, ()
        bb, opts = self.cell_info(live)
        lb = self.lower_bound(live)
        split = self.splitter(carried, bb) if carried else None
        mkey = (live, split)
        hit = self.exact.get(mkey)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit
        lb = max(self.lower.get(mkey, 0), lb)
        if lb >= ub:
            return lb, None
        self.stats.cells_expanded += 1
        if split is not None:
            value, segs = self._trivial(live, carried, split, ub)
        else:
            value, segs = self._search(live, carried, bb, opts, ub)
        self._store(mkey, value, segs, ub)
        return value, segs

    def _trivial(self, live, carried, split, ub):
        self.stats.ops_tried["trivial"] += 1
        a = split.anchor
        below = above = 0
        for i in _bits(live):
            rect = self.rects[i]
            hi = rect.y2 if split.is_horizontal else rect.x2
            if hi < a:
                below |= 1 << i
            else:
                above |= 1 << i
        rest = tuple(s for s in carried
                     if not (s.orientation is split.orientation and s.anchor == a))
        v1, s1 = self.solve(below, rest, ub)
        if s1 is None:
            return v1, None
        v2, s2 = self.solve(above, rest, ub - v1)
        if s2 is None:
            return v1 + v2, None
        return v1 + v2, s1 + s2

    def _search(self, live, carried, region, first, ub):
        best, best_segs = ub, None
        # add operations, ascending arity
        for arity in range(1, self.cfg.add_arity_cap + 1):
            if len(carried) + arity > self.cap:
                self.stats.cap_pruned += 1
                break
            frontier = [(0, (), live, first)]
            while frontier:
                cost, added, rem, opts = frontier.pop(0)
                for c, seg, mask in opts:
                    if cost + c >= best:
                        break
                    new_added = added + (seg,)
                    new_rem = rem & ~mask
                    if len(new_added) < arity:
                        if new_rem:
                            frontier.append((cost + c, new_added, new_rem,
                                             self.cell_info(new_rem)[1]))
                        continue
                    self.stats.ops_tried["add"] += 1
                    v, segs = self.solve(new_rem, carried + new_added, best - cost - c)
                    if segs is not None and cost + c + v < best:
                        best, best_segs = cost + c + v, new_added + segs
        # line operations, ascending coordinate
        for coord, orient, crossed, left, right in self.line_ops(live, region):
            self.stats.ops_tried["line"] += 1
            g, gsegs = self.line_solution(crossed) if crossed else (0, ())
            if g >= best:
                continue
            v1, s1 = self.solve(left, carried, best - g)
            if s1 is None:
                continue
            v2, s2 = self.solve(right, carried, best - g - v1)
            if s2 is None:
                continue
            if g + v1 + v2 < best:
                best, best_segs = g + v1 + v2, gsegs + s1 + s2
        return best, best_segs


def _check_tall(inst: Instance):
    bad = [r.id for r in inst.rects if not r.is_tall]
    if bad:
        raise OrientationViolation(f"rects {bad} have height < width")


def solve_hv_tall(inst: Instance, cfg: DpConfig = DpConfig()) -> tuple:
    """(1+eps)-style DP for HV-stabbing when every rectangle has h >= w.

    Returns ``(solution, stats)``.  The greedy cover is the initial
    incumbent, so the result never costs more than greedy.
    """
    _check_tall(inst)
    if cfg.normalize:
        from .preprocess import denormalize, normalize_tall

        norm, rec = normalize_tall(inst, cfg.eps)
        inner, stats = solve_hv_tall(norm, DpConfig(
            cfg.eps, cfg.add_arity_cap, cfg.line_candidate_source, cfg.memo_capacity,
            cfg.offset_policy, False))
        return denormalize(inner, rec).tagged("dp"), stats
    stats = DpStats()
    if inst.n == 0:
        return Solution((), 0, "dp"), stats
    incumbent = greedy_cover(inst, solver_tag="dp")
    dp = _HvDp(inst, cfg, stats, line_cache={})
    best_cost, best_segs = incumbent.cost + 1, None
    for a in cfg.offsets():
        dp.set_offset(a)
        value, segs = dp.solve((1 << inst.n) - 1, (), best_cost)
        stats.offset_costs[a] = value if segs is not None else None
        if segs is not None and value < best_cost:
            best_cost, best_segs = value, segs
            stats.best_offset = a
    if best_segs is None or best_cost > incumbent.cost:
        sol = incumbent
    else:
        sol = Solution.of(best_segs, "dp")
    verdict = verify(inst, sol)
    if not verdict.feasible:
        raise Infeasible(f"DP produced an infeasible solution: {verdict.unstabbed}")
    return sol, stats


def solve_stabbing(inst: Instance, cfg: DpConfig = DpConfig()) -> Solution:
    """Horizontal-only stabbing via vertical stretching.

    Every y-coordinate is multiplied by ``K`` so that any vertical stab
    costs more than the greedy horizontal solution; the HV DP then never
    uses a vertical segment.
    """
    if inst.n == 0:
        return Solution((), 0, "stabbing")
    horizontal = greedy_cover(inst, horizontal_candidates(inst))
    threshold = horizontal.cost + 1
    need = max(threshold, max(r.width for r in inst.rects))
    k = max(1, -(-need // min(r.height for r in inst.rects)))
    stretched = Instance(tuple(Rect(r.x1, r.y1 * k, r.x2, r.y2 * k, r.id) for r in inst.rects),
                         inst.grid_unit, inst.epsilon)
    sol, _ = solve_hv_tall(stretched, DpConfig(
        cfg.eps, cfg.add_arity_cap, cfg.line_candidate_source, cfg.memo_capacity,
        cfg.offset_policy, False))
    if sol.has_vertical:
        raise VerticalLeak(f"vertical segment in stretched solution (K={k})")
    segs = []
    for s in sol.segments:
        if s.anchor % k:
            hit = [r for r in stretched.rects if stabs(s, r)]
            anchor = max(r.y1 for r in hit) // k
        else:
            anchor = s.anchor // k
        segs.append(Segment(H, anchor, s.lo, s.hi))
    out = Solution.of(segs, "stabbing")
    verdict = verify(inst, out)
    if not verdict.feasible:
        raise Infeasible(f"stabbing solution misses {verdict.unstabbed}")
    return out


def split_by_orientation(inst: Instance) -> tuple:
    """Ids of tall (h >= w) and wide (h < w) rectangles."""
    tall = [r.id for r in inst.rects if r.is_tall]
    wide = [r.id for r in inst.rects if not r.is_tall]
    return tall, wide


def solve_hv_2eps_parts(inst: Instance, cfg: DpConfig = DpConfig()) -> tuple:
    """``(union, tall_part, wide_part)`` for general rectangles."""
    tall, wide = split_by_orientation(inst)
    tall_sol, _ = solve_hv_tall(inst.subset(tall), cfg)
    wide_t, _ = solve_hv_tall(inst.subset(wide).transposed(), cfg)
    wide_sol = wide_t.transposed()
    return tall_sol.union(wide_sol, solver_tag="dp2eps"), tall_sol, wide_sol


def solve_hv_2eps(inst: Instance, cfg: DpConfig = DpConfig()) -> Solution:
    return solve_hv_2eps_parts(inst, cfg)[0]
