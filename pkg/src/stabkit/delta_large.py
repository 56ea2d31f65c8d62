"""Pipeline for instances whose rectangles have sides at most 1 and at least
one side of length >= delta.

The instance is cut into vertical strips of width ``1/eps**2``; each strip is
swept bottom-up into cells whose greedy cost stays below ``cost_cap``.  Inside
a cell the long segments (length >= delta) of a solution are guessed; every
rectangle left over has a short side below delta and is handled by the
tall/wide DP split.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Union

from .baseline import CoverSystem, greedy_cover, stab_line_rects
from .candidates import CandidateSet, canonical_candidates
from .dp import DpConfig, solve_hv_tall, split_by_orientation
from .errors import BadParams, GuessSpaceExceeded, Infeasible, SideTooLong
from .geometry import V, Instance, Rect, Solution, bounding_box, hseg, stabs, verify
from .preprocess import check_eps, denormalize, normalize_general


@dataclass(frozen=True)
class DeltaConfig:
    delta: Fraction = Fraction(1, 2)
    eps: Fraction = Fraction(1, 4)
    guess_size_cap: int = 4
    cost_cap: Optional[Fraction] = None
    node_budget: int = 50_000
    strip_offsets: Union[str, int] = "all"
    dp_offset: Union[str, int] = 0
    normalize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if not 0 < self.delta <= 1:
            raise BadParams(f"delta={self.delta} must lie in (0, 1]")
        if self.cost_cap is None:
            object.__setattr__(self, "cost_cap", 1 / self.eps**3)
        else:
            object.__setattr__(self, "cost_cap", Fraction(self.cost_cap))

    @property
    def strip_width(self) -> Fraction:
        return 1 / self.eps**2

    def offsets(self) -> list:
        if self.strip_offsets == "all":
            return list(range(int(self.strip_width)))
        return [int(self.strip_offsets)]


@dataclass
class CellDecomposition:
    """Cells (closed regions with disjoint interiors) plus boundary stabs.

    ``members[k]`` lists the ids of the rectangles assigned to ``cells[k]``.
    ``close_costs`` holds the greedy cost (real units) at which each sweep
    cut was placed.
    """

    cells: list
    boundary_segments: Solution
    per_cell_baseline_cost: list
    members: list = field(default_factory=list)
    offset_a: int = 0
    close_costs: list = field(default_factory=list)
    boundary_ids: tuple = ()


@dataclass
class DeltaStats:
    offset_a: int = 0
    cells: int = 0
    guesses_tried: int = 0
    greedy_fallbacks: int = 0
    boundary_cost: int = 0
    close_costs: list = field(default_factory=list)


def _greedy_cost(inst: Instance) -> int:
    return greedy_cover(inst).cost if inst.n else 0


def check_delta_large(inst: Instance, delta) -> None:
    g = inst.grid_unit
    for r in inst.rects:
        if r.width * g > 1 or r.height * g > 1:
            raise SideTooLong(f"rect {r.id} has a side longer than 1")
        if max(r.width, r.height) * g < delta:
            raise BadParams(f"rect {r.id} has both sides shorter than delta={delta}")


def strip_partition(inst: Instance, cfg: DeltaConfig, offset_a: int) -> CellDecomposition:
    """Cut along vertical lines ``x = offset_a + k / eps**2`` (real units).

    Rectangles met by a line are stabbed along it with the line subroutine;
    the rest are grouped by strip.
    """
    g = inst.grid_unit
    width = cfg.strip_width / g
    origin = Fraction(offset_a) / g
    boundary = []
    crossed_ids = set()
    strips = {}
    lines = {}
    for r in inst.rects:
        k_lo = math.ceil((r.x1 - origin) / width)
        if origin + k_lo * width <= r.x2:
            lines.setdefault(k_lo, []).append(r.id)
            crossed_ids.add(r.id)
        else:
            strips.setdefault(k_lo - 1, []).append(r.id)
    for k in sorted(lines):
        sub = inst.subset(lines[k])
        x = origin + k * width
        sol = stab_line_rects(sub, V, x, sub.bounds)
        parent = sub.meta["parent_ids"]
        boundary.extend(sol.segments)
        assert all(any(stabs(s, inst.rects[parent[r.id]]) for s in sol.segments)
                   for r in sub.rects)
    cells, members, costs = [], [], []
    for k in sorted(strips):
        ids = tuple(strips[k])
        box = bounding_box(inst.rects[i] for i in ids)
        lo, hi = origin + k * width, origin + (k + 1) * width
        cells.append(Rect(lo, box.y1, hi, box.y2, len(cells)))
        members.append(ids)
        costs.append(_greedy_cost(inst.subset(ids)))
    return CellDecomposition(cells, Solution.of(boundary, "boundary"), costs, members,
                             offset_a, boundary_ids=tuple(sorted(crossed_ids)))


def best_strip_partition(inst: Instance, cfg: DeltaConfig) -> CellDecomposition:
    """Offset with the smallest boundary-plus-baseline cost (first on ties)."""
    best = None
    for a in cfg.offsets():
        dec = strip_partition(inst, cfg, a)
        total = dec.boundary_segments.cost + sum(dec.per_cell_baseline_cost)
        if best is None or total < best[0]:
            best = (total, dec)
    return best[1]


def sweep_cells(strip: Instance, cfg: DeltaConfig, x_range: Optional[tuple] = None) -> CellDecomposition:
    """Sweep y upward; cut where the greedy cost of the rectangles wholly below
    the sweep line first exceeds ``cost_cap``.

    The cut is a horizontal segment at that y; it stabs every rectangle it
    crosses and is clipped to their x-span.  Cells get the rectangles lying
    strictly between consecutive cuts.
    """
    g = strip.grid_unit
    if x_range is None:
        box = strip.bounds
        x_range = (box.x1, box.x2) if box else (0, 0)
    cells, members, costs, close, boundary = [], [], [], [], []
    crossed_all = []
    pending = sorted(strip.rects, key=lambda r: (r.y2, r.y1, r.id))
    floor = None
    while pending:
        cut = None
        prev_cost = 0
        for y in sorted({r.y2 for r in pending}):
            below = [r.id for r in pending if r.y2 <= y]
            c = _greedy_cost(strip.subset(below))
            if c * g > cfg.cost_cap:
                cut = (y, c)
                break
            prev_cost = c
        if cut is None:
            ids = tuple(sorted(r.id for r in pending))
            box = bounding_box(pending)
            cells.append(Rect(x_range[0], box.y1 if floor is None else floor, x_range[1],
                              box.y2, len(cells)))
            members.append(ids)
            costs.append(prev_cost)
            break
        y0, c = cut
        crossed = [r for r in pending if r.y1 <= y0 <= r.y2]
        inside = [r for r in pending if r.y2 < y0]
        if crossed:
            boundary.append(hseg(y0, min(r.x1 for r in crossed), max(r.x2 for r in crossed)))
            crossed_all.extend(r.id for r in crossed)
        if inside:
            cells.append(Rect(x_range[0], min(r.y1 for r in inside) if floor is None else floor,
                              x_range[1], y0, len(cells)))
            members.append(tuple(sorted(r.id for r in inside)))
            costs.append(prev_cost)
            close.append(c * g)
        floor = y0
        pending = [r for r in pending if r.y1 > y0]
    return CellDecomposition(cells, Solution.of(boundary, "boundary"), costs, members,
                             close_costs=close, boundary_ids=tuple(sorted(crossed_all)))


def partition_sound(inst: Instance, dec: CellDecomposition) -> bool:
    """Every rectangle is boundary-stabbed or a member of exactly one cell,
    members lie inside their cell, and cell interiors are disjoint."""
    count = [0] * inst.n
    for k, ids in enumerate(dec.members):
        for i in ids:
            if not dec.cells[k].contains(inst.rects[i]):
                return False
            count[i] += 1
    segs = dec.boundary_segments.segments
    for r in inst.rects:
        hit = any(stabs(s, r) for s in segs)
        if count[r.id] > 1 or (count[r.id] == 0 and not hit):
            return False
    for a, b in itertools.combinations(dec.cells, 2):
        if max(a.x1, b.x1) < min(a.x2, b.x2) and max(a.y1, b.y1) < min(a.y2, b.y2):
            return False
    return True


def _long_candidates(cell: Instance, cfg: DeltaConfig, cands: CandidateSet) -> list:
    g = cell.grid_unit
    long_ = [s for s in cands if s.length * g >= cfg.delta]
    cs = CoverSystem.build(cell.rects, long_).reduced()
    return sorted((seg for seg, _, _ in cs.sets), key=lambda s: (s.length, s))


def guess_size_limit(cell: Instance, cfg: DeltaConfig) -> int:
    alpha = math.log(max(cell.n, 1)) + 1
    return min(cfg.guess_size_cap, math.ceil(alpha * cfg.cost_cap / cfg.delta))


def guess_long_segments(cell_inst: Instance, cfg: DeltaConfig,
                        cands: Optional[CandidateSet] = None) -> Iterator[Solution]:
    """Subsets of the non-dominated long candidates in (size, cost, lex) order.

    Raises GuessSpaceExceeded before yielding anything if the number of
    subsets exceeds ``cfg.node_budget``.
    """
    if cands is None:
        cands = canonical_candidates(cell_inst)
    long_ = _long_candidates(cell_inst, cfg, cands)
    cap = min(guess_size_limit(cell_inst, cfg), len(long_))
    total = sum(math.comb(len(long_), k) for k in range(cap + 1))
    if total > cfg.node_budget:
        raise GuessSpaceExceeded(f"{total} guesses over {len(long_)} long candidates "
                                 f"exceed budget {cfg.node_budget}")
    return _iter_guesses(long_, cap)


def _iter_guesses(long_: list, cap: int) -> Iterator[Solution]:
    for k in range(cap + 1):
        combos = sorted(itertools.combinations(long_, k),
                        key=lambda c: (sum(s.length for s in c), c))
        for c in combos:
            yield Solution.of(c, "guess")


def _dp_solver(cfg: DeltaConfig) -> Callable:
    dcfg = DpConfig(eps=cfg.eps, offset_policy=cfg.dp_offset)

    def run(part: Instance) -> Solution:
        return solve_hv_tall(part, dcfg)[0]
    return run


def _solve_parts(cell: Instance, ids: tuple, sub_solver: Callable, cache: dict) -> Solution:
    hit = cache.get(ids)
    if hit is not None:
        return hit
    sub = cell.subset(ids)
    tall, wide = split_by_orientation(sub)
    segs = []
    if tall:
        segs.extend(sub_solver(sub.subset(tall)).segments)
    if wide:
        segs.extend(s.transposed() for s in sub_solver(sub.subset(wide).transposed()).segments)
    sol = Solution.of(segs, "cell")
    cache[ids] = sol
    return sol


def solve_cell(cell: Instance, cfg: DeltaConfig, sub_solver: Optional[Callable] = None,
               stats: Optional[DeltaStats] = None) -> Solution:
    """Cheapest (guess + tall part + wide part) over all long-segment guesses.

    ``sub_solver`` maps a tall instance to a solution (DP by default).
    Guesses leaving a rectangle with both sides >= delta unstabbed are
    skipped; guesses whose own cost reaches the incumbent are pruned.
    """
    if cell.n == 0:
        return Solution((), 0, "cell")
    sub_solver = sub_solver or _dp_solver(cfg)
    g = cell.grid_unit
    big = [r for r in cell.rects if min(r.width, r.height) * g >= cfg.delta]
    cache = {}
    best = None
    for guess in guess_long_segments(cell, cfg):
        if best is not None and guess.cost >= best.cost:
            continue
        if stats is not None:
            stats.guesses_tried += 1
        if not all(any(stabs(s, r) for s in guess.segments) for r in big):
            continue
        rest = tuple(r.id for r in cell.rects if not any(stabs(s, r) for s in guess.segments))
        assert all(min(cell.rects[i].width, cell.rects[i].height) * g < cfg.delta for i in rest)
        part = _solve_parts(cell, rest, sub_solver, cache)
        total = guess.cost + part.cost
        if best is None or total < best.cost:
            best = guess.union(part, solver_tag="cell")
    if best is None:
        raise Infeasible("no long-segment guess stabs every large rectangle")
    return best


def _solve_cell_or_greedy(cell: Instance, cfg: DeltaConfig, stats: DeltaStats) -> Solution:
    try:
        return solve_cell(cell, cfg, stats=stats)
    except GuessSpaceExceeded:
        stats.greedy_fallbacks += 1
        return greedy_cover(cell)


def decompose(inst: Instance, cfg: DeltaConfig) -> tuple:
    """Strip partition at the best offset followed by a sweep of every strip.

    Returns ``(strips, cells)``; ``cells`` has ids of ``inst``.
    """
    strips = best_strip_partition(inst, cfg)
    cells, members, costs, close = [], [], [], []
    boundary = list(strips.boundary_segments.segments)
    bids = list(strips.boundary_ids)
    for box, ids in zip(strips.cells, strips.members):
        sub = inst.subset(ids)
        parent = sub.meta["parent_ids"]
        x_range = (box.x1, box.x2)
        dec = sweep_cells(sub, cfg, x_range)
        cells.extend(dec.cells)
        members.extend(tuple(parent[i] for i in m) for m in dec.members)
        costs.extend(dec.per_cell_baseline_cost)
        close.extend(dec.close_costs)
        boundary.extend(dec.boundary_segments.segments)
        bids.extend(parent[i] for i in dec.boundary_ids)
    out = CellDecomposition(cells, Solution.of(boundary, "boundary"), costs, members,
                            strips.offset_a, close, tuple(sorted(bids)))
    return strips, out


def run_delta_large(inst: Instance, cfg: DeltaConfig) -> tuple:
    """``(solution, stats, decomposition)`` for a delta-large instance."""
    check_eps(cfg.eps)
    check_delta_large(inst, cfg.delta)
    stats = DeltaStats()
    if inst.n == 0:
        return Solution((), 0, "delta"), stats, CellDecomposition([], Solution((), 0), [])
    work, rec = normalize_general(inst, cfg.eps) if cfg.normalize else (inst, None)
    _, dec = decompose(work, cfg)
    if not partition_sound(work, dec):
        raise AssertionError("cell decomposition is not sound")
    stats.offset_a = dec.offset_a
    stats.cells = len(dec.cells)
    stats.boundary_cost = dec.boundary_segments.cost
    stats.close_costs = list(dec.close_costs)
    segs = list(dec.boundary_segments.segments)
    for ids in dec.members:
        cell = work.subset(ids)
        sol = _solve_cell_or_greedy(cell, cfg, stats)
        segs.extend(sol.segments)
    sol = Solution.of(segs, "delta")
    if not verify(work, sol).feasible:
        raise Infeasible("delta-large pipeline produced an infeasible solution")
    if rec is not None:
        sol = denormalize(sol, rec)
        if not verify(inst, sol).feasible:
            raise Infeasible("denormalized solution is infeasible")
    return sol.tagged("delta"), stats, dec


def solve_delta_large(inst: Instance, cfg: DeltaConfig = DeltaConfig()) -> Solution:
    return run_delta_large(inst, cfg)[0]
