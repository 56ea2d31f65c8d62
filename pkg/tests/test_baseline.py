import math

import pytest
from hypothesis import given, settings

from stabkit.baseline import (
    CoverSystem, OracleBudget, exact_oracle, greedy_cover, greedy_select, line_crossed,
    stab_line_rects,
)
from stabkit.candidates import CandidateSet, canonical_candidates
from stabkit.errors import BudgetExceeded, Infeasible
from stabkit.geometry import H, V, Instance, Rect, hseg, verify, vseg
from oracles import subset_enumeration_cost
from strategies import instances


def test_single_rect_costs_shorter_side():
    sol = exact_oracle(Instance.from_boxes([(0, 0, 2, 1)]))
    assert sol.cost == 1 and sol.segments[0].orientation is V


def test_shared_horizontal_stab():
    sol = exact_oracle(Instance.from_boxes([(0, 0, 1, 2), (0, 1, 1, 3)]))
    assert sol.cost == 1 and len(sol) == 1 and sol.segments[0].is_horizontal


def test_disjoint_tall_rects_stabbed_separately():
    sol = exact_oracle(Instance.from_boxes([(0, 0, 1, 10), (5, 0, 6, 10)]))
    assert sol.cost == 2 and len(sol) == 2


def test_empty_instance():
    inst = Instance(())
    assert exact_oracle(inst).cost == 0
    assert greedy_cover(inst).cost == 0


def test_budget_limits():
    inst = Instance.from_boxes([(i, 0, i + 1, 1) for i in range(0, 24, 2)])
    with pytest.raises(BudgetExceeded):
        exact_oracle(inst)
    small = Instance.from_boxes([(0, 0, 3, 3), (1, 1, 4, 4), (2, 0, 5, 2)])
    with pytest.raises(BudgetExceeded):
        exact_oracle(small, budget=OracleBudget(max_cands=1))


def test_infeasible_candidates():
    inst = Instance.from_boxes([(0, 0, 1, 1), (5, 5, 6, 6)])
    cands = CandidateSet([hseg(0, 0, 1)], [])
    with pytest.raises(Infeasible):
        exact_oracle(inst, cands)
    with pytest.raises(Infeasible):
        greedy_cover(inst, cands)


def test_greedy_single_cover():
    inst = Instance.from_boxes([(0, 0, 1, 2), (0, 1, 1, 3)])
    s = hseg(1, 0, 1)
    assert greedy_cover(inst, CandidateSet([s], [])).segments == (s,)


def test_greedy_tie_break_is_deterministic():
    inst = Instance.from_boxes([(0, 0, 2, 2)])
    # four candidates of length 2; the lexicographically smallest wins
    assert greedy_cover(inst).segments == (hseg(0, 0, 2),)


def test_cover_system_reduction_drops_dominated():
    rects = [Rect(0, 0, 1, 2, 0), Rect(0, 1, 1, 3, 1)]
    cs = CoverSystem.build(rects, [hseg(1, 0, 1), hseg(0, 0, 1), hseg(1, 0, 2)])
    red = cs.reduced()
    assert [s for s, _, _ in red.sets] == [hseg(1, 0, 1)]


def test_line_subroutine_empty():
    inst = Instance.from_boxes([(0, 0, 1, 1)])
    assert stab_line_rects(inst, V, 5, inst.bounds).cost == 0


def test_line_subroutine_single():
    inst = Instance.from_boxes([(0, 0, 3, 1), (5, 0, 6, 1)])
    sol = stab_line_rects(inst, V, 2, inst.bounds)
    assert sol.cost == 1 and sol.solver_tag == "line"


def test_line_subroutine_stacked():
    inst = Instance.from_boxes([(0, k, 2, k + 4) for k in range(4)])
    sol = stab_line_rects(inst, V, 1, inst.bounds)
    assert sol.cost == 2 and len(sol) == 1
    assert sol.cost == exact_oracle(inst).cost


def test_line_crossed_respects_region():
    inst = Instance.from_boxes([(0, 0, 2, 2), (0, 5, 2, 7)])
    assert [r.id for r in line_crossed(inst, H, 1, Rect(0, 0, 3, 3))] == [0]


@settings(max_examples=40, deadline=None)
@given(instances(max_n=4, max_coord=6, max_side=3))
def test_oracle_matches_subset_enumeration(inst):
    cands = canonical_candidates(inst)
    if len(cands) > 14:
        return
    assert exact_oracle(inst, cands).cost == subset_enumeration_cost(inst.rects, cands)


@settings(max_examples=40, deadline=None)
@given(instances(max_n=7))
def test_greedy_within_log_factor(inst):
    ex = exact_oracle(inst)
    gr = greedy_cover(inst)
    assert verify(inst, gr).feasible and verify(inst, ex).feasible
    assert ex.cost <= gr.cost <= (math.log(inst.n) + 1) * ex.cost


@settings(max_examples=25, deadline=None)
@given(instances(max_n=6))
def test_oracle_ignores_candidate_order(inst):
    cands = canonical_candidates(inst)
    rev = CandidateSet(list(reversed(cands.horizontal)), list(reversed(cands.vertical)))
    a, b = exact_oracle(inst, cands), exact_oracle(inst, rev)
    assert a.cost == b.cost and a.segments == b.segments


def test_greedy_select_direct():
    rects = [Rect(0, 0, 1, 2, 0), Rect(3, 0, 4, 2, 1)]
    chosen = greedy_select(rects, [hseg(0, 0, 4), hseg(0, 0, 1), hseg(0, 3, 4)])
    assert sorted(chosen) == [hseg(0, 0, 1), hseg(0, 3, 4)]
