"""Exact proportionality guarantees for approval committees.

The package measures how strongly a committee violates justified
representation style axioms, parameterised by a rational scaling factor
alpha, and searches for committees minimising that factor.
"""

from .core import (
    AlphaQuotaError,
    BudgetExceededError,
    Budgets,
    Committee,
    DEFAULT_BUDGETS,
    InfeasibleError,
    Instance,
    Rational,
    ValidationError,
    format_rational,
    load_instance,
    parse_committee,
    parse_instance,
    parse_rational,
    serialize_instance,
    validate_committee,
)
from .domains import (
    CandidateOrder,
    PartyStructure,
    VoterOrder,
    ci_alpha_ejr,
    ci_greedy_jr,
    ci_optimal_alpha_jr,
    detect_party_list,
    detect_structures,
    party_list_optimal_ejr,
    recognize_ci,
    recognize_vi,
    structured_optimal_alpha,
    verify_order,
    vi_alpha_ejr,
    vi_greedy_jr,
    vi_optimal_alpha_jr,
)
from .experiments import (
    ExperimentGrid,
    ExperimentRecord,
    RULE_ORDER,
    RowSummary,
    csv_header,
    load_grid_config,
    pooled_distance,
    read_csv,
    run_grid,
    run_instance,
    summarize,
    write_csv,
)
from .optimize import (
    AlphaGrid,
    OptimizationOutcome,
    alpha_grid,
    exists_committee_jr,
    export_lp,
    optimal_alpha,
    optimal_alpha_ejr,
    optimal_alpha_ejr_plus,
    optimal_alpha_jr,
)
from .rules import RULES, RuleOutcome, cc_score, mes, minimal_mes_budget, pav_score
from .sampling import (
    SamplerConfig,
    SplitMix64,
    derive_seed,
    sample,
    sample_euclidean,
    sample_ic,
)
from .verify import (
    Axiom,
    AxiomResult,
    Violation,
    alpha_ejr,
    alpha_ejr_plus,
    alpha_jr,
    alpha_of,
    satisfies,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaGrid",
    "AlphaQuotaError",
    "Axiom",
    "AxiomResult",
    "BudgetExceededError",
    "Budgets",
    "CandidateOrder",
    "Committee",
    "DEFAULT_BUDGETS",
    "ExperimentGrid",
    "ExperimentRecord",
    "InfeasibleError",
    "Instance",
    "OptimizationOutcome",
    "PartyStructure",
    "RULES",
    "RULE_ORDER",
    "Rational",
    "RowSummary",
    "RuleOutcome",
    "SamplerConfig",
    "SplitMix64",
    "ValidationError",
    "Violation",
    "VoterOrder",
    "alpha_ejr",
    "alpha_ejr_plus",
    "alpha_grid",
    "alpha_jr",
    "alpha_of",
    "cc_score",
    "ci_alpha_ejr",
    "ci_greedy_jr",
    "ci_optimal_alpha_jr",
    "csv_header",
    "derive_seed",
    "detect_party_list",
    "detect_structures",
    "exists_committee_jr",
    "export_lp",
    "format_rational",
    "load_grid_config",
    "load_instance",
    "mes",
    "minimal_mes_budget",
    "optimal_alpha",
    "optimal_alpha_ejr",
    "optimal_alpha_ejr_plus",
    "optimal_alpha_jr",
    "parse_committee",
    "parse_instance",
    "parse_rational",
    "party_list_optimal_ejr",
    "pav_score",
    "pooled_distance",
    "read_csv",
    "recognize_ci",
    "recognize_vi",
    "run_grid",
    "run_instance",
    "sample",
    "sample_euclidean",
    "sample_ic",
    "serialize_instance",
    "structured_optimal_alpha",
    "summarize",
    "validate_committee",
    "verify_order",
    "vi_alpha_ejr",
    "vi_greedy_jr",
    "vi_optimal_alpha_jr",
    "write_csv",
    "__version__",
]
