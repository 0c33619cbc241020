"""Desk-scale laboratory for the minimum bisection width of planted
bisection random graphs: graph generation, Warning Propagation, the
distributional fixed point on the 2-simplex, Galton-Watson cross-checks, and
exact brute-force oracles."""

__version__ = "0.1.0"

from .errors import BudgetError, ConfigError, GraphFileError, HardCheckError
from .graphs import (
    FrozenAssignment,
    Graph,
    ModelParams,
    PlantedAssignment,
    class_degrees,
    load_graph,
    planted_cut_width,
    sample_planted_graph,
    store_graph,
)
from .core import (
    CoreParams,
    CoreSet,
    component_closure,
    extract_core,
    restrict_assignment,
    verify_core_property,
)
from .wp import (
    MessageState,
    bisection_estimate,
    cut_width,
    init_messages,
    psi,
    psi_tilde,
    vertex_field,
    vertex_fields,
    wp_run,
    wp_step,
)
from .fixed_point import (
    Dist3,
    FixedPointResult,
    SkellamSpec,
    apply_T_convolution,
    apply_T_exact,
    apply_T_mc,
    bar_swap,
    contraction_ratio,
    find_fixed_point,
    gap_condition,
    is_skewed,
    phi_exact,
    phi_mc,
    sample_skewed,
    skew_threshold,
    wasserstein1,
)
from .gw import (
    CYCLIC_BUCKET,
    TypedTree,
    canonical_code,
    census_tv,
    neighborhood_census,
    root_message_distribution,
    sample_tree,
    tree_census,
    tree_to_graph,
    truncate_tree,
    wp_upward,
)
from .oracle import (
    CutDifferenceReport,
    cut_difference_check,
    min_bisection_exact,
    min_cut_extension,
)
from .experiment import ExperimentConfig, RunRecord, run_end_to_end, sweep, sweep_csv
from .rng import derive_rng
