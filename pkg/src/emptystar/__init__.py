"""Empty simplices of random point sets: enumeration, degrees and integral geometry."""

__version__ = "0.1.0"

from .bodies import Ball, ConvexBody, Cube, Ellipse, Polygon, parse_body
from .enumeration import (
    EmptySimplexReport,
    GammaFunctionalResult,
    count_empty_simplices,
    deg_k_max,
    deg_tuple,
    enumerate_empty_simplices_naive,
    fast_planar_empty_triangles,
    gamma_functionals,
    star,
)
from .experiments import ExperimentConfig, poisson_gof, run_sweep, run_sweep_full
from .geom import (
    GeneralPositionError,
    GeometryError,
    PointSet,
    is_general_position,
    max_edge_length,
    orientation,
    point_in_open_simplex,
    simplex_volume,
)
from .integrals import (
    ConstantTable,
    Hyperplane,
    appendix_I,
    beta_fn,
    estimate_cd,
    kappa,
    lemma1_limit,
    planar_deg_constant,
    sample_hyperplane,
    section_integral,
    theorem2_constants,
    theorem2_limit_rhs,
)
from .rng import RngStream
from .stats import EstimateSummary, summarize, tv_distance

__all__ = [
    "Ball", "ConvexBody", "Cube", "Ellipse", "Polygon", "parse_body",
    "EmptySimplexReport", "GammaFunctionalResult", "count_empty_simplices", "deg_k_max",
    "deg_tuple", "enumerate_empty_simplices_naive", "fast_planar_empty_triangles",
    "gamma_functionals", "star",
    "ExperimentConfig", "poisson_gof", "run_sweep", "run_sweep_full",
    "GeneralPositionError", "GeometryError", "PointSet", "is_general_position",
    "max_edge_length", "orientation", "point_in_open_simplex", "simplex_volume",
    "ConstantTable", "Hyperplane", "appendix_I", "beta_fn", "estimate_cd", "kappa",
    "lemma1_limit", "planar_deg_constant", "sample_hyperplane", "section_integral",
    "theorem2_constants", "theorem2_limit_rhs",
    "RngStream", "EstimateSummary", "summarize", "tv_distance",
]
