"""Weighted Fermat-Torricelli and generalized Gauss tree solvers for convex
quadrilaterals: locations, dynamic weight plasticity, absorbing values and the
universal minimum, steady/evolutionary tree mechanics, plus a CLI with SVG
output."""

from .errors import (
    AbsorbedWeightsError,
    ConvergenceError,
    DegenerateTreeError,
    DiagonalPointError,
    DocumentError,
    InconsistentCaseError,
    InconsistentDistancesError,
    InfeasibleTriangleError,
    InfeasibleWeightsError,
    InverseUndefinedError,
    OverspendError,
    QuadFTError,
)
from .fermat import (
    CaseKind,
    CaseTag,
    FermatTree,
    WeightedQuadrilateral,
    classify_case,
    locate_4wft,
    solve_4wft_general,
    solve_4wft_square,
    triangle_wft_angles,
    weighted_distance_sum,
    weiszfeld,
)
from .gauss import (
    GaussTree,
    GaussWeights,
    LocalAngles,
    WeightReport,
    feasible_xg_interval,
    gauss_objective,
    local_angles,
    residual_absorbing_rate,
    solve_gauss_tree,
    tree_span,
    validate_gauss_weights,
)
from .geometry import (
    DistanceSet,
    Point,
    Quadrilateral,
    angle_at,
    cayley_menger,
    cayley_menger_from_lengths,
    diagonal_intersection,
    resolve_planar_diagonal,
    triangle_angle,
)
from .plasticity import (
    PlasticityLine,
    PlasticityReport,
    inverse_3wft_ratio,
    plasticity_line,
    plasticity_system_new,
    verify_plasticity,
)
from .universal import (
    TreeKind,
    TreeState,
    UniversalResult,
    UniversalSample,
    absorbing_xg,
    classify_tree,
    evolve,
    universal_minimum,
    universal_set,
    weights_for_storage,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorbedWeightsError",
    "CaseKind",
    "CaseTag",
    "ConvergenceError",
    "DegenerateTreeError",
    "DiagonalPointError",
    "DistanceSet",
    "DocumentError",
    "FermatTree",
    "GaussTree",
    "GaussWeights",
    "InconsistentCaseError",
    "InconsistentDistancesError",
    "InfeasibleTriangleError",
    "InfeasibleWeightsError",
    "InverseUndefinedError",
    "LocalAngles",
    "OverspendError",
    "PlasticityLine",
    "PlasticityReport",
    "Point",
    "QuadFTError",
    "Quadrilateral",
    "TreeKind",
    "TreeState",
    "UniversalResult",
    "UniversalSample",
    "WeightReport",
    "WeightedQuadrilateral",
    "absorbing_xg",
    "angle_at",
    "cayley_menger",
    "cayley_menger_from_lengths",
    "classify_case",
    "classify_tree",
    "diagonal_intersection",
    "evolve",
    "feasible_xg_interval",
    "gauss_objective",
    "inverse_3wft_ratio",
    "local_angles",
    "locate_4wft",
    "plasticity_line",
    "plasticity_system_new",
    "residual_absorbing_rate",
    "resolve_planar_diagonal",
    "solve_4wft_general",
    "solve_4wft_square",
    "solve_gauss_tree",
    "tree_span",
    "triangle_angle",
    "triangle_wft_angles",
    "universal_minimum",
    "universal_set",
    "validate_gauss_weights",
    "verify_plasticity",
    "weighted_distance_sum",
    "weights_for_storage",
    "weiszfeld",
]
