"""Face-number machinery for recursively built Hanner polytopes.

Exact coefficient recursions, window-composition maps, weighted-tree
representations, small-dimension geometric oracles, and an asymptotics
harness, exposed both as a library and through the ``hannerfaces`` CLI.
"""

from .asymptotics import (
    EnvelopeReport,
    FitResult,
    ScanRow,
    bound_envelope,
    fit_exponent,
    floor_d_delta,
    flm_report,
    scan,
)
from .errors import BudgetExceededError, PrecisionError, UsageError, VerificationError
from .geometry import (
    FaceLattice,
    RadiiState,
    VPolytope,
    build_polytope,
    f_vector_crosscheck,
    face_lattice,
    radii,
    radii_recursion,
)
from .phimap import PhiMap, apply_phi, compose_window, tfree_and_top, window_phis, word_from_string
from .polys import (
    IntPoly,
    LogPoly,
    convolve_truncated,
    eval_at_one,
    log_convolve_truncated,
    power_truncated,
)
from .recursion import (
    Engine,
    RecursionState,
    face_numbers,
    initial_state,
    proper_f_vector,
    step,
    verify_growth_bounds,
)
from .schedule import DensityParam, StepKind, Window, choose_window, is_product_step, window_profile
from .trees import (
    LowerBoundCertificate,
    TreeStats,
    atypical_count_and_leaf_bound,
    build_lower_bound_tree,
    count_trees,
    enumerate_trees,
    lower_bound_certificate,
    lower_bound_value,
    preorder_decode,
    preorder_encode,
    tree_sum_check,
    tree_weight,
    upper_bound_report,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "DensityParam",
    "Engine",
    "EnvelopeReport",
    "FaceLattice",
    "FitResult",
    "IntPoly",
    "LogPoly",
    "LowerBoundCertificate",
    "PhiMap",
    "PrecisionError",
    "RadiiState",
    "RecursionState",
    "ScanRow",
    "StepKind",
    "TreeStats",
    "UsageError",
    "VPolytope",
    "VerificationError",
    "Window",
    "apply_phi",
    "atypical_count_and_leaf_bound",
    "bound_envelope",
    "build_lower_bound_tree",
    "build_polytope",
    "choose_window",
    "compose_window",
    "convolve_truncated",
    "count_trees",
    "enumerate_trees",
    "eval_at_one",
    "f_vector_crosscheck",
    "face_lattice",
    "face_numbers",
    "fit_exponent",
    "floor_d_delta",
    "flm_report",
    "initial_state",
    "is_product_step",
    "log_convolve_truncated",
    "lower_bound_certificate",
    "lower_bound_value",
    "power_truncated",
    "preorder_decode",
    "preorder_encode",
    "proper_f_vector",
    "radii",
    "radii_recursion",
    "scan",
    "step",
    "tfree_and_top",
    "tree_sum_check",
    "tree_weight",
    "upper_bound_report",
    "verify_growth_bounds",
    "window_phis",
    "window_profile",
    "word_from_string",
]
