"""Average-case deterministic query complexity of boolean functions."""

from .bfcore import (
    EcsPartition,
    PathSpec,
    Restriction,
    TruthTable,
    certificate_complexity,
    ecs_partition,
    format_table,
    min_certificate,
    parse_table,
    read_table,
    restrict,
    weight,
    write_table,
)
from .criticality import (
    LambdaEstimate,
    RestrictionTail,
    corollary_bounds,
    lambda_estimate,
    lemma43_bound,
    prop41_check,
    restriction_tail,
)
from .errors import (
    AvgQueryError,
    BoundViolation,
    LimitExceeded,
    ParseError,
    PreconditionError,
    ZeroErrorViolation,
)
from .exact import (
    DecisionTreeNode,
    ExactRational,
    brute_force_dave,
    dave_exact,
    dtsize_min,
    optimal_tree,
    worst_depth,
)
from .families import (
    DnfFormula,
    Theorem13Instance,
    canonical_dnf,
    compose,
    dnf_eval,
    dnf_parse,
    dnf_print,
    dnf_to_table,
    make_named,
    pso,
    theorem13_bounds,
    theorem13_construct,
)
from .randgen import (
    BoxProcessTrace,
    box_process,
    is_delta_parity_path,
    is_t_delta_parity,
    lemma36_experiment,
    sample_fixed_weight,
    theorem12_harness,
)
from .report import ExperimentReport
from .strategies import (
    CostReport,
    DecisionStrategy,
    MonteCarlo,
    ecs_strategy,
    measure_cost,
    naive_strategy,
    partition_strategy,
    recursive_strategy,
    restriction_strategy,
)

__version__ = "0.1.0"

__all__ = [
    "AvgQueryError",
    "BoundViolation",
    "box_process",
    "BoxProcessTrace",
    "brute_force_dave",
    "canonical_dnf",
    "certificate_complexity",
    "compose",
    "corollary_bounds",
    "CostReport",
    "dave_exact",
    "DecisionStrategy",
    "DecisionTreeNode",
    "ExperimentReport",
    "dnf_eval",
    "dnf_parse",
    "dnf_print",
    "dnf_to_table",
    "DnfFormula",
    "dtsize_min",
    "ecs_partition",
    "ecs_strategy",
    "EcsPartition",
    "ExactRational",
    "format_table",
    "is_delta_parity_path",
    "is_t_delta_parity",
    "lambda_estimate",
    "LambdaEstimate",
    "lemma36_experiment",
    "lemma43_bound",
    "LimitExceeded",
    "make_named",
    "measure_cost",
    "min_certificate",
    "MonteCarlo",
    "naive_strategy",
    "optimal_tree",
    "parse_table",
    "ParseError",
    "partition_strategy",
    "PathSpec",
    "PreconditionError",
    "prop41_check",
    "pso",
    "read_table",
    "recursive_strategy",
    "restrict",
    "Restriction",
    "restriction_strategy",
    "restriction_tail",
    "RestrictionTail",
    "sample_fixed_weight",
    "theorem12_harness",
    "theorem13_bounds",
    "theorem13_construct",
    "Theorem13Instance",
    "TruthTable",
    "weight",
    "worst_depth",
    "write_table",
    "ZeroErrorViolation",
]
