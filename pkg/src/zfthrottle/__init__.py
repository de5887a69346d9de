"""Exact zero-forcing throttling toolkit.

Four color change rules (standard, PSD, and their minor monotone floors),
exact throttling solvers with certificates, PSD extension machinery,
forbidden-family catalogs, and a verification harness that replays the
structure theorems over exhaustive small-graph corpora.
"""

from .engine import (
    ComponentTree,
    Force,
    ForcingSchedule,
    ForcingTree,
    Rule,
    Stalled,
    component_tree,
    forcing_trees,
    min_propagation_floor,
    propagate_deterministic,
    valid_forces,
)
from .errors import (
    CapacityError,
    DomainError,
    Graph6ParseError,
    InternalConsistencyError,
    ScriptError,
    UsageError,
    ZFError,
)
from .extension import (
    ExtensionGraph,
    LabeledExtensionTree,
    MinorScript,
    apply_script,
    build_extension,
    build_labeled_tree,
    characterization_certificate,
)
from .graph6 import emit_graph6, parse_graph6, read_graph6_file
from .graphs import (
    Graph,
    add_edge,
    complement,
    connected_components,
    contract_edge,
    delete_edge,
    disjoint_union,
    induced_subgraph,
    is_connected,
    parse_edge_list,
)
from .canonical import canonical_form
from .catalog import (
    AcceleratorDecomposition,
    GkMember,
    brute_force_accelerator,
    classify_th_eq_n,
    classify_thplus,
    contains_Gk_member,
    generate_Gk,
    is_accelerator,
    named_graph,
)
from .enumeration import enumerate_connected
from .induced import induced_subgraph_search
from .products import ProductTemplate, cartesian_product_template
from .spectral import max_spectral_graphs, spectral_radius
from .throttle import (
    CertificateSubgraph,
    ThrottlingCertificate,
    extract_certificate_subgraph,
    floor_throttling_via_supergraphs,
    savings,
    standardize_witness,
    throttling_number,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
