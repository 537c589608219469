"""Two-qubit synthesis: Weyl-chamber analysis, pulse-efficient templates,
approximation fidelity tables, and single-qubit resynthesis."""

from .weyl import (
    WeylCoordinates,
    KakDecomposition,
    canonical_matrix,
    kak,
    weyl_coordinates,
    local_align,
)
from .fidelity import (
    FidelityTable,
    trace_norms,
    fidelity_table,
    best_entangler_count,
)
from .oneq import zyz_angles, zxzxz_angles, emit_1q, collapse_1q_runs
from .templates import (
    Su4Decomposition,
    synthesize_pulse_efficient,
    synthesize_mirrored,
    best_approximation,
    best_approximation_mirrored,
)

__all__ = [
    "WeylCoordinates",
    "KakDecomposition",
    "canonical_matrix",
    "kak",
    "weyl_coordinates",
    "local_align",
    "FidelityTable",
    "trace_norms",
    "fidelity_table",
    "best_entangler_count",
    "zyz_angles",
    "zxzxz_angles",
    "emit_1q",
    "collapse_1q_runs",
    "Su4Decomposition",
    "synthesize_pulse_efficient",
    "synthesize_mirrored",
    "best_approximation",
    "best_approximation_mirrored",
]
