"""Exact branch-and-bound oracle, greedy weighted set cover, line subroutine."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .candidates import CandidateSet, canonical_candidates
from .errors import BudgetExceeded, Infeasible
from .geometry import Instance, Orientation, Rect, Segment, Solution, stab_mask


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 10
    max_cands: int = 64


class CoverSystem:
    """Rectangles as elements, segments as weighted sets (bitmask covers)."""

    def __init__(self, universe: int, sets: list):
        self.universe = universe
        self.sets = sets  # list of (segment, covered mask, weight)

    @classmethod
    def build(cls, rects: Sequence[Rect], segments: Iterable[Segment]) -> "CoverSystem":
        sets = []
        for seg in segments:
            mask = stab_mask(seg, rects)
            if mask:
                sets.append((seg, mask, seg.length))
        return cls((1 << len(rects)) - 1, sets)

    @property
    def coverable(self) -> int:
        m = 0
        for _, mask, _ in self.sets:
            m |= mask
        return m

    def reduced(self) -> "CoverSystem":
        """Drop duplicate and dominated sets.

        A set is dominated when another covers a superset at no greater
        weight; some optimum always survives the reduction.
        """
        best = {}
        for seg, mask, w in self.sets:
            cur = best.get(mask)
            if cur is None or (w, seg) < (cur[2], cur[0]):
                best[mask] = (seg, mask, w)
        items = sorted(best.values(), key=lambda t: (t[2], -bin(t[1]).count("1"), t[0]))
        kept = []
        for seg, mask, w in items:
            if any(m & mask == mask and kw <= w for _, m, kw in kept):
                continue
            kept.append((seg, mask, w))
        kept.sort(key=lambda t: (t[2], t[0]))
        return CoverSystem(self.universe, kept)


def _solution_key(segs):
    return (sum(s.length for s in segs), len(segs), tuple(sorted(segs)))


def greedy_select(rects: Sequence[Rect], segments: Iterable[Segment]) -> list:
    """Greedy weighted set cover: repeatedly take min weight per new element."""
    cs = CoverSystem.build(rects, segments)
    if cs.coverable != cs.universe:
        missing = [i for i in range(len(rects)) if not (cs.coverable >> i) & 1]
        raise Infeasible(f"rects {[rects[i].id for i in missing]} have no candidate")
    uncovered = cs.universe
    chosen = []
    while uncovered:
        best = None
        for seg, mask, w in cs.sets:
            new = (mask & uncovered).bit_count()
            if not new:
                continue
            if best is not None:
                # compare w/new against bw/bnew without building fractions
                lhs, rhs = w * best[1], best[0] * new
                if lhs > rhs or (lhs == rhs and (w, seg) >= (best[0], best[2])):
                    continue
            best = (w, new, seg, mask)
        chosen.append(best[2])
        uncovered &= ~best[3]
    return chosen


def greedy_cover(inst: Instance, cands: Optional[CandidateSet] = None,
                 solver_tag: str = "greedy") -> Solution:
    if cands is None:
        cands = canonical_candidates(inst)
    return Solution.of(greedy_select(inst.rects, cands), solver_tag)


def line_crossed(inst: Instance, line_orientation: Orientation, line_coord, region: Rect) -> list:
    """Rects inside ``region`` met by the full line (closed)."""
    out = []
    for r in inst.rects:
        if not region.contains(r):
            continue
        if line_orientation is Orientation.V:
            hit = r.x1 <= line_coord <= r.x2
        else:
            hit = r.y1 <= line_coord <= r.y2
        if hit:
            out.append(r)
    return out


def stab_line_rects(inst: Instance, line_orientation: Orientation, line_coord,
                    region: Rect) -> Solution:
    """Stab the rectangles of ``region`` crossed by a full line, greedily."""
    crossed = line_crossed(inst, line_orientation, line_coord, region)
    if not crossed:
        return Solution((), 0, "line")
    sub = inst.subset(r.id for r in crossed)
    return Solution.of(greedy_select(sub.rects, canonical_candidates(sub)), "line")


class _BranchAndBound:
    def __init__(self, cs: CoverSystem):
        self.cs = cs
        n = cs.universe.bit_length()
        self.elem_sets = [[k for k, (_, m, _) in enumerate(cs.sets) if (m >> i) & 1]
                          for i in range(n)]
        self.cheapest = [min(cs.sets[k][2] for k in ks) if ks else None
                         for ks in self.elem_sets]
        # bounds are kept as integers scaled by lcm(1..n) to stay exact
        self.scale = math.lcm(*range(1, n + 1)) if n else 1
        self.best_key = None
        self.best = None
        self.seen = {}
        self.nodes = 0

    def lower_bound(self, uncovered: int) -> int:
        """Scaled max of the per-element share bound and the costliest
        cheapest cover of a single uncovered element."""
        sets, scale = self.cs.sets, self.scale
        share = 0
        single = 0
        i = 0
        u = uncovered
        while u:
            if u & 1:
                single = max(single, self.cheapest[i])
                share += min(sets[k][2] * (scale // bin(sets[k][1] & uncovered).count("1"))
                             for k in self.elem_sets[i])
            u >>= 1
            i += 1
        return max(share, single * scale)

    def run(self, uncovered: int, chosen: list, cost: int):
        self.nodes += 1
        if uncovered == 0:
            key = _solution_key(chosen)
            if self.best_key is None or key < self.best_key:
                self.best_key, self.best = key, list(chosen)
            return
        if self.best_key is not None:
            if cost * self.scale + self.lower_bound(uncovered) > self.best_key[0] * self.scale:
                return
        prev = self.seen.get(uncovered)
        if prev is not None and prev < cost:
            return
        self.seen[uncovered] = cost if prev is None else min(prev, cost)
        pivot = min((i for i in range(len(self.elem_sets)) if (uncovered >> i) & 1),
                    key=lambda i: (len(self.elem_sets[i]), i))
        for k in self.elem_sets[pivot]:
            seg, mask, w = self.cs.sets[k]
            chosen.append(seg)
            self.run(uncovered & ~mask, chosen, cost + w)
            chosen.pop()


def exact_oracle(inst: Instance, cands: Optional[CandidateSet] = None,
                 budget: OracleBudget = OracleBudget(), solver_tag: str = "exact") -> Solution:
    """Minimum-cost sub-collection of ``cands`` stabbing every rectangle.

    Ties are broken by (cost, fewer segments, lexicographic segment list).
    The candidate budget applies to the reduced cover system.
    """
    if inst.n > budget.max_n:
        raise BudgetExceeded(f"n={inst.n} exceeds oracle budget {budget.max_n}")
    if cands is None:
        cands = canonical_candidates(inst)
    cs = CoverSystem.build(inst.rects, cands)
    if cs.coverable != cs.universe:
        raise Infeasible("candidates do not cover every rectangle")
    cs = cs.reduced()
    if len(cs.sets) > budget.max_cands:
        raise BudgetExceeded(f"{len(cs.sets)} candidates exceed budget {budget.max_cands}")
    bb = _BranchAndBound(cs)
    bb.run(cs.universe, [], 0)
    segs = sorted(bb.best) if bb.best else []
    return Solution.of(segs, solver_tag)
