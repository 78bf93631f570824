"""Worst-case disclosure of sensitive values in bucketized tables.

A bucketized table hides who has which sensitive value inside each bucket.
This package computes, exactly, the highest posterior an attacker can reach
on any single person-value assertion when armed with a bounded number of
implication-shaped background facts: a polynomial dynamic program for real
sizes, a brute-force enumeration oracle to verify it at small sizes, and a
search over generalization lattices for the least-general safe publication.
"""

from .curves import (
    CurvePoint,
    SkewedSingleBucketFamily,
    disclosure_vs_k,
    emit_csv,
    entropy_vs_disclosure,
    read_csv,
)
from .engine import (
    DisclosureReport,
    EngineCacheInfo,
    Placement,
    avoidance_probability,
    cache_info,
    clear_cache,
    max_disclosure,
    max_disclosure_negated_atoms,
    minimize_across_buckets,
    minimize_within_bucket,
)
from .errors import (
    BucketRiskError,
    BudgetExceededError,
    InconsistentKnowledgeError,
    ParseError,
    ValidationError,
)
from .knowledge import (
    Atom,
    BasicImplication,
    Knowledge,
    format_knowledge,
    holds,
    implication_holds,
    knowledge_holds,
    negation_as_implication,
    parse_atom,
    parse_knowledge,
    simple_implication,
    validate_atom,
    validate_knowledge,
)
from .lattice import (
    Hierarchy,
    SafetyThreshold,
    all_minimal_safe,
    apply,
    binary_search_chain,
    height_utility,
    is_safe,
    leq,
    load_hierarchy,
    select_by_utility,
)
from .oracle import (
    DEFAULT_BUDGET,
    brute_force_max_disclosure,
    exact_posterior,
    knowledge_probability,
    world_count,
)
from .table import (
    Bucket,
    Bucketization,
    Record,
    Table,
    dump_table,
    load_table,
    make_bucket,
    min_bucket_entropy,
    partition,
    read_assignment,
    read_domain,
)

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BasicImplication",
    "Bucket",
    "BucketRiskError",
    "Bucketization",
    "BudgetExceededError",
    "CurvePoint",
    "DEFAULT_BUDGET",
    "DisclosureReport",
    "EngineCacheInfo",
    "Hierarchy",
    "InconsistentKnowledgeError",
    "Knowledge",
    "ParseError",
    "Placement",
    "Record",
    "SafetyThreshold",
    "SkewedSingleBucketFamily",
    "Table",
    "ValidationError",
    "all_minimal_safe",
    "apply",
    "avoidance_probability",
    "binary_search_chain",
    "brute_force_max_disclosure",
    "cache_info",
    "clear_cache",
    "disclosure_vs_k",
    "dump_table",
    "emit_csv",
    "entropy_vs_disclosure",
    "exact_posterior",
    "format_knowledge",
    "height_utility",
    "holds",
    "implication_holds",
    "is_safe",
    "knowledge_holds",
    "knowledge_probability",
    "leq",
    "load_hierarchy",
    "load_table",
    "make_bucket",
    "max_disclosure",
    "max_disclosure_negated_atoms",
    "min_bucket_entropy",
    "minimize_across_buckets",
    "minimize_within_bucket",
    "negation_as_implication",
    "parse_atom",
    "parse_knowledge",
    "partition",
    "read_assignment",
    "read_csv",
    "read_domain",
    "select_by_utility",
    "simple_implication",
    "validate_atom",
    "validate_knowledge",
    "world_count",
]
