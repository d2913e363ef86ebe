"""
wllab - Weisfeiler-Leman Refinement Laboratory
Exact partition refinement on arc-coloured complete digraphs

This library provides:
- Dense labelled partitions of V^k with refinement comparison
- Weisfeiler-Leman, counting and invertible-map refinement operators
- Exact linear algebra over Q and GF(p), including simultaneous similarity
- Coherent configurations, standard bases and algebraic isomorphism
- Refinement schemes, the EP construction and an orbit oracle
- A graph corpus (named, random, CFI) and a manifest-driven suite runner

Usage:
    from wllab import named, spas_apply, compare

    g = named("path", n=3)
    arcs = spas_apply("wl", g, 2)
    print(arcs.class_count)  # 5

    # Operators on any partition of V^k
    from wllab import OperatorSpec, fixed_point, atomic_types
    result = fixed_point(OperatorSpec("im", 3, field="gf:2"), atomic_types(g, 3))
"""

__version__ = "0.1.0"
__author__ = "wllab developers"

# Core imports for public API
from .exceptions import (
    WllabError, ValidationError, ShapeMismatchError, CapExceededError, SimilarityUndecidedError,
    NotRainbowError, NotGraphLikeError, ClosureViolationError, ParseError, ConfigurationError,
)
from .config import Settings, settings, get_logging_config, override_settings
from .partition import (
    Comparison, LabelledPartition, Graph, GraphLikeReport, RainbowReport,
    substitute, project, concat, atomic_types, project_partition, compare, canonicalize,
    is_invariant, is_consistent, is_graph_like, reshape, flatten,
    discrete_partition, unit_partition, from_function,
)
from .fields import (
    FieldSpec, FieldMatrix, MatrixTuple, Q, GF,
    rank, kernel_basis, intertwiner_space, simultaneously_similar,
)
from .refine import (
    OperatorFamily, OperatorSpec, FixedPointResult,
    wl_step, c_step, im_step, imt_step, im_r_step, apply_step, fixed_point,
    is_wl_stable, is_c_stable, is_im_stable, is_imt_stable, is_imr_stable, is_stable,
    chi_matrices, hat_extension,
)
from .coherent import (
    CoherentConfiguration, NotCoherent, StandardBasis, Semisimplicity,
    validate_rainbow, intersection_numbers, cells, restrict, verify_adjacency_algebra,
    standard_basis, algebraic_isomorphism, radical_support, is_semisimple_guaranteed, coherent_closure,
)
from .automorphism import automorphisms, find_isomorphism, is_isomorphic, orbit_partition
from .generators import (
    named, all_n4, cfi_graph, cfi_pair, cfi_parity, random_coloured_digraph, disjoint_union,
    default_corpus, encode_graph, decode_graph, read_graph, write_graph, read_partition, write_partition,
)
from .spas import (
    SpasFamily, SpasId, AxiomReport,
    spas_apply, ep, sch_oracle, distinguishes, dominance_report, spas_axiom_check, convergence_level,
)
from .schemas import DominanceReport, GraphDoc, PartitionDoc, SuiteReport

try:
    from .suite import SuiteRunner, SuiteConfig, run_suite, run_suite_async, load_manifest
    SUITE_AVAILABLE = True
except ImportError:
    SUITE_AVAILABLE = False

try:
    from .cli import cli, main
    CLI_AVAILABLE = True
except ImportError:
    CLI_AVAILABLE = False


__all__ = [
    # Errors and configuration
    'WllabError', 'ValidationError', 'ShapeMismatchError', 'CapExceededError',
    'SimilarityUndecidedError', 'NotRainbowError', 'NotGraphLikeError', 'ClosureViolationError',
    'ParseError', 'ConfigurationError',
    'Settings', 'settings', 'get_logging_config', 'override_settings',

    # Partitions
    'Comparison', 'LabelledPartition', 'Graph', 'GraphLikeReport', 'RainbowReport',
    'substitute', 'project', 'concat', 'atomic_types', 'project_partition', 'compare', 'canonicalize',
    'is_invariant', 'is_consistent', 'is_graph_like', 'reshape', 'flatten',
    'discrete_partition', 'unit_partition', 'from_function',

    # Fields
    'FieldSpec', 'FieldMatrix', 'MatrixTuple', 'Q', 'GF',
    'rank', 'kernel_basis', 'intertwiner_space', 'simultaneously_similar',

    # Operators
    'OperatorFamily', 'OperatorSpec', 'FixedPointResult',
    'wl_step', 'c_step', 'im_step', 'imt_step', 'im_r_step', 'apply_step', 'fixed_point',
    'is_wl_stable', 'is_c_stable', 'is_im_stable', 'is_imt_stable', 'is_imr_stable', 'is_stable',
    'chi_matrices', 'hat_extension',

    # Coherent configurations
    'CoherentConfiguration', 'NotCoherent', 'StandardBasis', 'Semisimplicity',
    'validate_rainbow', 'intersection_numbers', 'cells', 'restrict', 'verify_adjacency_algebra',
    'standard_basis', 'algebraic_isomorphism', 'radical_support', 'is_semisimple_guaranteed',
    'coherent_closure',

    # Automorphisms and corpus
    'automorphisms', 'find_isomorphism', 'is_isomorphic', 'orbit_partition',
    'named', 'all_n4', 'cfi_graph', 'cfi_pair', 'cfi_parity', 'random_coloured_digraph',
    'disjoint_union', 'default_corpus', 'encode_graph', 'decode_graph', 'read_graph', 'write_graph',
    'read_partition', 'write_partition',

    # Schemes
    'SpasFamily', 'SpasId', 'AxiomReport',
    'spas_apply', 'ep', 'sch_oracle', 'distinguishes', 'dominance_report', 'spas_axiom_check',
    'convergence_level',
    'DominanceReport', 'GraphDoc', 'PartitionDoc', 'SuiteReport',

    # Feature flags
    'SUITE_AVAILABLE', 'CLI_AVAILABLE',
]

if SUITE_AVAILABLE:
    __all__ += ['SuiteRunner', 'SuiteConfig', 'run_suite', 'run_suite_async', 'load_manifest']
if CLI_AVAILABLE:
    __all__ += ['cli', 'main']
