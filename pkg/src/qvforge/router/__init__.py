"""Layout and routing: exact 0-1 program, greedy baseline, and emission."""

from .bip import (
    BipModel,
    Constraint,
    GateCost,
    RoutingConfig,
    build_bip,
    build_gate_costs,
)
from .solve import (
    GatePlacement,
    LayoutSolution,
    RoutingError,
    SwapPlacement,
    assignment_of,
    check_assignment,
    solve_bip,
)
from .heuristic import route_heuristic
from .apply import EmissionStats, apply_layout, emission_stats

__all__ = [
    "BipModel",
    "Constraint",
    "GateCost",
    "RoutingConfig",
    "build_bip",
    "build_gate_costs",
    "GatePlacement",
    "LayoutSolution",
    "RoutingError",
    "SwapPlacement",
    "assignment_of",
    "check_assignment",
    "solve_bip",
    "route_heuristic",
    "EmissionStats",
    "apply_layout",
    "emission_stats",
]
