"""Twin subgraphs and core-semiperiphery-periphery (CSP) structures."""

from .csp import (
    CORE,
    PERIPHERY,
    SEMIPERIPHERY,
    CspDecomposition,
    CspError,
    CspValidationReport,
    compose,
    csp_from_edges,
    decompose,
    is_csp_structure,
    reduce,
    validate,
)
from .enumeration import (
    census,
    census_graphs,
    count_s,
    count_t,
    csp_counts,
    enumerate_csp_structures,
    enumerate_graphs,
)
from .graph import (
    CanonicalForm,
    Graph,
    PartitionedGraph,
    canonical_form,
    complement,
    disjoint_union,
    distance,
    eccentricity,
    is_isomorphic,
    join,
    quotient,
    standard_graph,
    subgraph_distance,
)
from .twin import (
    TwinClass,
    TwinWitness,
    check_f_twin,
    check_t_twin,
    false_twin_vertices,
    find_c6_witness,
    has_proper_twin,
    true_twin_vertices,
    twin_classes,
)

__version__ = "0.1.0"

__all__ = [
    "CORE",
    "PERIPHERY",
    "SEMIPERIPHERY",
    "CanonicalForm",
    "CspDecomposition",
    "CspError",
    "CspValidationReport",
    "Graph",
    "PartitionedGraph",
    "TwinClass",
    "TwinWitness",
    "canonical_form",
    "census",
    "census_graphs",
    "check_f_twin",
    "check_t_twin",
    "complement",
    "compose",
    "count_s",
    "count_t",
    "csp_counts",
    "csp_from_edges",
    "decompose",
    "disjoint_union",
    "distance",
    "eccentricity",
    "enumerate_csp_structures",
    "enumerate_graphs",
    "false_twin_vertices",
    "find_c6_witness",
    "has_proper_twin",
    "is_csp_structure",
    "is_isomorphic",
    "join",
    "quotient",
    "reduce",
    "standard_graph",
    "subgraph_distance",
    "true_twin_vertices",
    "twin_classes",
    "validate",
]
