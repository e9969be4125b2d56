"""Gaussian Minkowski problems on pointed polyhedral cones.

Construct Wulff shapes over cones, measure their Gaussian volume, covolume
and reweighted surface area measures, solve the discrete inverse problem
(which support values produce a prescribed facet measure), and probe the
uniqueness / non-uniqueness regimes numerically.
"""

from .analysis import (
    InequalityCheck,
    NonUniquePair,
    UniquenessReport,
    build_section_pseudocone,
    find_nonunique_pair,
    log_concavity_chain_check,
    mixed_volume_inequality_check,
    sp_profile,
    uniqueness_check,
)
from .cones import (
    DirectionSet,
    FacetRegion,
    PolyhedralCone,
    PseudoCone,
    make_cone,
    polar_cone,
    validate_directions,
    wulff_shape,
)
from .errors import (
    DegenerateDirectionError,
    DimensionUnsupportedError,
    DirectionNotInteriorToConeError,
    DuplicateDirectionError,
    EmptyInputError,
    GaussMinkError,
    NonPositiveRadiusError,
    NonPositiveSupportError,
    NotFullDimensionalError,
    NotInteriorToPolarError,
    NotPointedError,
    PGreaterEqualNError,
    PeakNotBracketedError,
    StepTooLargeError,
    SwitchPointTooCloseError,
)
from .estimator import MinkowskiSolver
from .gaussian import (
    EstimatorConfig,
    MeasureEstimate,
    combined_budget,
    covolume,
    gaussian_measure_polyhedron,
    gaussian_volume,
    mc_probability,
    std_normal_cdf,
    std_normal_pdf,
    tail_bound,
    truncation_radius,
)
from .solver import SolverConfig, SolverResult, auto_initialize, residual, solve
from .surface import (
    SurfaceMeasureVector,
    facet_gaussian_area,
    gaussian_boundary_weight,
    radial_transform_integral,
    section_gaussian_area,
    sp_measure,
    sp_measure_vector,
)
from .variational import (
    fd_covolume_derivative,
    fd_volume_derivative,
    power_coords,
    product_functional,
    product_gradient,
    radial_derivative_check,
    ratio_functional,
    ratio_gradient,
    support_from_power,
    volume_gradient,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateDirectionError",
    "DimensionUnsupportedError",
    "DirectionNotInteriorToConeError",
    "DirectionSet",
    "DuplicateDirectionError",
    "EmptyInputError",
    "EstimatorConfig",
    "FacetRegion",
    "GaussMinkError",
    "InequalityCheck",
    "MeasureEstimate",
    "MinkowskiSolver",
    "NonPositiveRadiusError",
    "NonPositiveSupportError",
    "NonUniquePair",
    "NotFullDimensionalError",
    "NotInteriorToPolarError",
    "NotPointedError",
    "PGreaterEqualNError",
    "PeakNotBracketedError",
    "PolyhedralCone",
    "PseudoCone",
    "SolverConfig",
    "SolverResult",
    "StepTooLargeError",
    "SurfaceMeasureVector",
    "SwitchPointTooCloseError",
    "UniquenessReport",
    "auto_initialize",
    "build_section_pseudocone",
    "combined_budget",
    "covolume",
    "facet_gaussian_area",
    "fd_covolume_derivative",
    "fd_volume_derivative",
    "find_nonunique_pair",
    "gaussian_boundary_weight",
    "gaussian_measure_polyhedron",
    "gaussian_volume",
    "log_concavity_chain_check",
    "make_cone",
    "mc_probability",
    "mixed_volume_inequality_check",
    "polar_cone",
    "power_coords",
    "product_functional",
    "product_gradient",
    "radial_derivative_check",
    "radial_transform_integral",
    "ratio_functional",
    "ratio_gradient",
    "residual",
    "section_gaussian_area",
    "solve",
    "sp_measure",
    "sp_measure_vector",
    "sp_profile",
    "std_normal_cdf",
    "std_normal_pdf",
    "support_from_power",
    "tail_bound",
    "truncation_radius",
    "uniqueness_check",
    "validate_directions",
    "volume_gradient",
    "wulff_shape",
]
