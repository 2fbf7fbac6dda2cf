"""Vertex orderings for cutwidth, linear arrangement and pathwidth from
spreading-metric LPs and multi-scale exponential ball carving."""
from .graph import (
    Graph,
    GraphParseError,
    Ordering,
    PathDecomposition,
    boundary_vertices,
    cut_weight,
    cutwidth_cost,
    mla_cost,
    parse_graph,
    path_decomposition_from_ordering,
    validate_path_decomposition,
    vs_cost,
)
from .lp import LPError, MetricSolution, VSLPSolution, lp_solve, solve_mla_lp, solve_vs_lp
from .decompose import compute_scales, metric_decomposition, metric_vertex_decomposition
from .layout import (
    SolveConfig,
    approximation_factor,
    cutwidth_order,
    mla_guarantee_check,
    pathwidth_decomposition,
    pathwidth_order,
    solve_cutwidth,
    solve_pathwidth,
)
from .oracle import exact_cutwidth, exact_mla, exact_vs, lpcw_lower_bound, random_graph

__version__ = "0.1.0"
