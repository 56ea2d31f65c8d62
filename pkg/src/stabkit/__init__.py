"""Exact-arithmetic rectangle stabbing: geometry, baselines, DP, harness."""

from .baseline import CoverSystem, OracleBudget, exact_oracle, greedy_cover, stab_line_rects
from .candidates import CandidateSet, GridSpec, canonical_candidates, segment_level, well_align
from .delta_large import DeltaConfig, solve_delta_large
from .dp import DpConfig, solve_hv_2eps, solve_hv_tall, solve_stabbing
from .errors import StabError
from .generate import gen
from .geometry import Instance, Orientation, Rect, Segment, Solution, stabs, verify
from .preprocess import denormalize, normalize_general, normalize_tall, split_long_segments

__all__ = [
    "CandidateSet", "CoverSystem", "DeltaConfig", "DpConfig", "GridSpec", "Instance",
    "OracleBudget", "Orientation", "Rect", "Segment", "Solution", "StabError",
    "canonical_candidates", "denormalize", "exact_oracle", "gen", "greedy_cover",
    "normalize_general", "normalize_tall", "segment_level", "solve_delta_large",
    "solve_hv_2eps", "solve_hv_tall", "solve_stabbing", "split_long_segments",
    "stab_line_rects", "stabs", "verify", "well_align",
]
