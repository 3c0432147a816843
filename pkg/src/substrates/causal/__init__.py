"""Trivalent graph rewriting, causal networks, and dimension estimation."""

from .graph import SpaceGraph, dumbbell, hex_torus, k4, prism_ladder, theta_graph
from .rules import (
    MatchSite,
    OverlapReport,
    PatternTooLargeError,
    RuleGraph,
    StaleSiteError,
    UpdateRule,
    apply_rule,
    check_overlap_freedom,
    find_matches,
)
from .network import (
    CausalNetwork,
    Event,
    InvarianceVerdict,
    Schedule,
    ScheduleLimitError,
    build_causal_network,
    causal_invariance_test,
    networks_isomorphic,
)
from .dimension import DegenerateWindowError, DimensionEstimate, estimate_dimension

__all__ = [
    "SpaceGraph",
    "dumbbell",
    "hex_torus",
    "k4",
    "prism_ladder",
    "theta_graph",
    "MatchSite",
    "OverlapReport",
    "PatternTooLargeError",
    "RuleGraph",
    "StaleSiteError",
    "UpdateRule",
    "apply_rule",
    "check_overlap_freedom",
    "find_matches",
    "CausalNetwork",
    "Event",
    "InvarianceVerdict",
    "Schedule",
    "ScheduleLimitError",
    "build_causal_network",
    "causal_invariance_test",
    "networks_isomorphic",
    "DegenerateWindowError",
    "DimensionEstimate",
    "estimate_dimension",
]
