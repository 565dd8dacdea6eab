"""Rigidity of pseudorange frameworks and solvability of cooperative GNSS positioning."""
from .graphs import (
    Decomposition,
    DirectedPseudorangeGraph,
    GnssGraph,
    GraphError,
    SimpleGraph,
    UndirectedMultigraph,
    underlying_multigraph,
)
from .numeric import Configuration, TolerancePolicy, numeric_rank, sample_configuration
from .rigidity import (
    PseudorangeFramework,
    generic_rank_numeric,
    gnss_rigidity_matrix,
    is_infinitesimally_rigid,
    pseudorange_rigidity_matrix,
    s_d,
    s_p,
)
from .combinatorics import (
    DecompositionWitness,
    FlexibleCertificate,
    find_gnss_decomposition,
    find_rigid_decomposition,
    matroid_union_rank,
)
from .gnss import Scenario, estimate, is_solvable, load_scenario, simulate_measurements

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "Decomposition",
    "DecompositionWitness",
    "DirectedPseudorangeGraph",
    "FlexibleCertificate",
    "GnssGraph",
    "GraphError",
    "PseudorangeFramework",
    "Scenario",
    "SimpleGraph",
    "TolerancePolicy",
    "UndirectedMultigraph",
    "estimate",
    "find_gnss_decomposition",
    "find_rigid_decomposition",
    "generic_rank_numeric",
    "gnss_rigidity_matrix",
    "is_infinitesimally_rigid",
    "is_solvable",
    "load_scenario",
    "matroid_union_rank",
    "numeric_rank",
    "pseudorange_rigidity_matrix",
    "s_d",
    "s_p",
    "sample_configuration",
    "simulate_measurements",
    "underlying_multigraph",
]
