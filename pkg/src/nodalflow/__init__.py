"""Spectral flows for graph Laplacians.

Counts strong nodal domains of Laplacian eigenvectors and locates the
nodal deficiency through two one-parameter eigenvalue flows: an edge-based
perturbation on [0, 1] and a vertex-based graph subdivision on [0, inf).
"""

from .dirichlet import (
    ComponentEigenReport,
    DirichletProblem,
    component_first_eigenpairs,
    d_connected_components,
    dirichlet_problem,
    dirichlet_spectrum,
    restrict_eigenvector,
)
from .edge_flow import (
    DirectCount,
    EdgePerturbation,
    build_perturbation,
    flow_matrix,
    nodal_count_direct,
    run_edge_flow,
    sign_preserving_graph,
)
from .errors import (
    AssumptionViolated,
    ConnectivityExhausted,
    DegenerateEigenvalue,
    EigFailure,
    EmptyInterior,
    FlowConsistencyError,
    InvalidFamilyParams,
    NodalFlowError,
    NotAComponent,
    NotConnected,
    ZeroVertex,
)
from .families import (
    ConnectedER,
    FamilySpec,
    GridEigenOracle,
    complete,
    cycle,
    cycle_eigenbasis,
    erdos_renyi,
    generate,
    generate_connected_er,
    grid,
    grid_eigenvector_oracle,
    interval,
    path_eigenpair,
    petersen,
)
from .fileio import (
    branch_table_csv,
    canonical_json,
    flow_summary,
    load_graph,
    parse_graph,
    save_graph,
    serialize_graph,
)
from .graph_core import (
    LaplacianMatrix,
    WeightedGraph,
    adjacency_lists,
    betti_1,
    connected_components,
    is_connected,
    laplacian,
)
from .nodal import (
    CourantBettiReport,
    EigenSelection,
    NodalDecomposition,
    courant_and_betti_check,
    nodal_decomposition,
    perturb_to_nonzero,
    select_eigenpair,
    sign_change_edges,
    strong_domains_allowing_zeros,
    zero_vertices,
)
from .spectra import (
    BranchCrossing,
    FlowResult,
    Spectrum,
    eigendecompose,
    group_tolerance,
    multiplicity_of,
    track_branches,
)
from .vertex_flow import (
    SubdivisionGraph,
    bilinear_matrix,
    check_edge_equivalence,
    derivative_identity_check,
    extend,
    extension_coefficients,
    graph_at,
    limit_graph,
    run_vertex_flow,
    subdivide,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolated",
    "BranchCrossing",
    "ComponentEigenReport",
    "ConnectedER",
    "ConnectivityExhausted",
    "CourantBettiReport",
    "DegenerateEigenvalue",
    "DirectCount",
    "DirichletProblem",
    "EdgePerturbation",
    "EigFailure",
    "EigenSelection",
    "EmptyInterior",
    "FamilySpec",
    "FlowConsistencyError",
    "FlowResult",
    "GridEigenOracle",
    "InvalidFamilyParams",
    "LaplacianMatrix",
    "NodalDecomposition",
    "NodalFlowError",
    "NotAComponent",
    "NotConnected",
    "Spectrum",
    "SubdivisionGraph",
    "WeightedGraph",
    "ZeroVertex",
    "adjacency_lists",
    "betti_1",
    "bilinear_matrix",
    "branch_table_csv",
    "build_perturbation",
    "canonical_json",
    "check_edge_equivalence",
    "complete",
    "component_first_eigenpairs",
    "connected_components",
    "courant_and_betti_check",
    "cycle",
    "cycle_eigenbasis",
    "d_connected_components",
    "derivative_identity_check",
    "dirichlet_problem",
    "dirichlet_spectrum",
    "eigendecompose",
    "erdos_renyi",
    "extend",
    "extension_coefficients",
    "flow_matrix",
    "flow_summary",
    "generate",
    "generate_connected_er",
    "graph_at",
    "grid",
    "grid_eigenvector_oracle",
    "group_tolerance",
    "interval",
    "is_connected",
    "laplacian",
    "limit_graph",
    "load_graph",
    "multiplicity_of",
    "nodal_count_direct",
    "nodal_decomposition",
    "parse_graph",
    "path_eigenpair",
    "perturb_to_nonzero",
    "petersen",
    "restrict_eigenvector",
    "run_edge_flow",
    "run_vertex_flow",
    "save_graph",
    "select_eigenpair",
    "serialize_graph",
    "sign_change_edges",
    "sign_preserving_graph",
    "strong_domains_allowing_zeros",
    "subdivide",
    "track_branches",
    "zero_vertices",
]
