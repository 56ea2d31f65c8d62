from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stabkit.errors import SegmentOutOfBounds
from stabkit.geometry import (
    Instance, Rect, Solution, clip_segment, hseg, min_stab, stab_mask, stabs, verify, vseg,
)
from strategies import boxes


R = Rect(1, 0, 2, 2)


def test_horizontal_spanning_both_edges_stabs():
    assert stabs(hseg(1, 0, 3), R)


def test_vertical_stopping_below_top_does_not_stab():
    # anchor 3/2 in half-units: scale the whole picture by 2
    r2 = Rect(2, 0, 4, 4)
    assert not stabs(vseg(3, 0, 2), r2)


def test_boundary_contact_counts():
    assert stabs(hseg(2, 1, 2), R)
    assert stabs(vseg(1, 0, 2), R)


def test_segment_outside_anchor_range():
    assert not stabs(hseg(3, 0, 3), R)


def test_verify_empty():
    v = verify(Instance(()), Solution((), 0))
    assert v.feasible and v.recomputed_cost == 0 and v.unstabbed == []


def test_verify_single_rect():
    inst = Instance.from_boxes([(0, 0, 2, 1)])
    assert verify(inst, Solution.of([hseg(0, 0, 2)])) == (True, [], 2)
    v = verify(inst, Solution.of([hseg(0, 0, 1)]))
    assert not v.feasible and v.unstabbed == [0]


def test_verify_out_of_bounds():
    inst = Instance.from_boxes([(0, 0, 2, 1)])
    with pytest.raises(SegmentOutOfBounds):
        verify(inst, Solution.of([hseg(0, -1, 2)]))


def test_clip_examples():
    assert clip_segment(hseg(1, 0, 4), Rect(1, 0, 3, 2)) == hseg(1, 1, 3)
    assert clip_segment(vseg(5, 0, 2), Rect(0, 0, 3, 3)) is None
    s = hseg(1, 1, 2)
    assert clip_segment(s, Rect(0, 0, 3, 3)) is s


def test_clip_can_be_zero_length():
    c = clip_segment(hseg(1, 0, 3), Rect(3, 0, 5, 2))
    assert c is not None and c.length == 0


def test_rect_validation():
    with pytest.raises(ValueError):
        Rect(1, 0, 1, 2)


def test_instance_requires_dense_ids():
    with pytest.raises(ValueError):
        Instance((Rect(0, 0, 1, 1, id=1),))


def test_instance_rejects_huge_coordinates():
    with pytest.raises(ValueError):
        Instance.from_boxes([(0, 0, 2**63, 1)])


def test_subset_keeps_parent_ids():
    inst = Instance.from_boxes([(0, 0, 1, 1), (2, 2, 3, 3), (4, 4, 5, 5)], grid_unit=Fraction(1, 2))
    sub = inst.subset([2, 0])
    assert [r.id for r in sub.rects] == [0, 1]
    assert sub.meta["parent_ids"] == (0, 2)
    assert sub.grid_unit == Fraction(1, 2)


def test_min_stab_crosses_shorter_side():
    assert min_stab(Rect(0, 0, 2, 5)).length == 2
    assert min_stab(Rect(0, 0, 5, 2)) == vseg(0, 0, 2)


def test_stab_mask_bits():
    rects = [Rect(0, 0, 1, 2, 0), Rect(0, 1, 1, 3, 1), Rect(5, 0, 6, 1, 2)]
    assert stab_mask(hseg(1, 0, 1), rects) == 0b011


@given(boxes(), st.integers(-3, 15), st.integers(-3, 15), st.integers(0, 6), st.integers(0, 6))
def test_stabs_monotone_under_extension(b, anchor, lo, dl, dh):
    r = Rect(*b)
    s = hseg(anchor, lo, lo + 4)
    wider = hseg(anchor, lo - dl, lo + 4 + dh)
    if stabs(s, r):
        assert stabs(wider, r)
    if stabs(s.transposed(), r):
        assert stabs(wider.transposed(), r)


@given(boxes(), boxes(), st.integers(0, 15), st.integers(-2, 8), st.integers(0, 8))
def test_clip_shrinks_and_is_idempotent(rb, region_b, anchor, lo, span):
    region = Rect(*region_b)
    for s in (hseg(anchor, lo, lo + span), vseg(anchor, lo, lo + span)):
        c = clip_segment(s, region)
        if c is None:
            continue
        assert c.length <= s.length
        assert clip_segment(c, region) == c


@given(st.lists(boxes(), min_size=1, max_size=5))
def test_verify_cost_matches_solution(bs):
    inst = Instance.from_boxes(bs)
    segs = [min_stab(r) for r in inst.rects]
    sol = Solution.of(segs)
    v = verify(inst, sol)
    assert v.feasible and v.recomputed_cost == sol.cost
