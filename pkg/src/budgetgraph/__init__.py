"""Budget allocation on graph edges.

An edge of length ``l`` holding budget ``b`` has weight ``l / b``. This
package finds budget allocations minimizing the weighted radius or the
weighted distance sum: exactly on trees (for one root and for all roots at
once), within a certified factor on general metrics, plus verification
oracles and a set-cover reduction generator for the hard general case.
"""

from .core import (
    ABS_TOL,
    REL_TOL,
    Allocation,
    AllocationError,
    BudgetGraph,
    GraphError,
    RootedTree,
    SolveReport,
    close,
    edge_weight,
    evaluate_median,
    evaluate_radius,
    load_allocation,
    load_graph,
    root_tree,
    weighted_distances,
)
from .hardness import (
    ReductionError,
    ReductionOutput,
    SetCoverInstance,
    cover_to_allocation,
    reduce_setcover,
    star_optimal_radius,
)
from .median import (
    MedianDP,
    compute_median_dp,
    solve_all_roots_median,
    solve_rooted_median,
    solve_unrooted_median,
    unweighted_tree_medians,
)
from .metric import (
    ApproxReport,
    MetricError,
    MetricSpace,
    approx_metric_radius,
    balanced_tree,
    hamiltonian_path,
    level_uniform_allocation,
    mst,
    unfold_to_line,
)
from .oracle import (
    EnumerationCapError,
    OracleConfig,
    exact_small_graph_radius,
    iter_spanning_trees,
    numeric_optimize_median,
    numeric_optimize_radius,
    spanning_tree_count,
)
from .radius import (
    AllRootsRadius,
    RadiusDP,
    compute_radius_dp,
    radius_lower_bound,
    solve_all_roots_radius,
    solve_rooted_radius,
)

__version__ = "0.1.0"

__all__ = [
    "ABS_TOL",
    "REL_TOL",
    "Allocation",
    "AllocationError",
    "AllRootsRadius",
    "ApproxReport",
    "BudgetGraph",
    "EnumerationCapError",
    "GraphError",
    "MedianDP",
    "MetricError",
    "MetricSpace",
    "OracleConfig",
    "RadiusDP",
    "ReductionError",
    "ReductionOutput",
    "RootedTree",
    "SetCoverInstance",
    "SolveReport",
    "approx_metric_radius",
    "balanced_tree",
    "close",
    "compute_median_dp",
    "compute_radius_dp",
    "cover_to_allocation",
    "edge_weight",
    "evaluate_median",
    "evaluate_radius",
    "exact_small_graph_radius",
    "hamiltonian_path",
    "iter_spanning_trees",
    "level_uniform_allocation",
    "load_allocation",
    "load_graph",
    "mst",
    "numeric_optimize_median",
    "numeric_optimize_radius",
    "radius_lower_bound",
    "reduce_setcover",
    "root_tree",
    "solve_all_roots_median",
    "solve_all_roots_radius",
    "solve_rooted_median",
    "solve_rooted_radius",
    "solve_unrooted_median",
    "spanning_tree_count",
    "star_optimal_radius",
    "unfold_to_line",
    "unweighted_tree_medians",
    "weighted_distances",
]
