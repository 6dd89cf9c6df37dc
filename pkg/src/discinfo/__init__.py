"""Exact information-theoretic quantities on finite discrete distributions.

The package computes entropies, cross-entropies, KL divergences, and mutual
information exactly -- including the mixed quantities between random
variables and observed (tied) outcomes such as the information gain and
the surprise -- plus a parser for an ASCII notation, an identity /
counterexample search suite, an entropy-form bound for binomial
coefficients, and exact-enumeration Bayesian models with BALD and
label-aware core-set acquisition at desk scale.
"""

from .bayes import (
    BayesModel,
    CsdDecomposition,
    Dataset,
    ElboVAEResult,
    ElboVIResult,
    LatentVarModel,
    Posterior,
    bald,
    batch_score,
    csd,
    csd_decomposition,
    elbo_vae,
    elbo_vi,
    joint_label_hypothesis,
    load_model,
    log_evidence,
    posterior,
    predictive,
    surprise,
    update,
)
from .dist import (
    Assignment,
    JointDistribution,
    UnnormalizedWeight,
    Variable,
    condition,
    dump_distribution,
    load_distribution,
    marginalize,
    mixture,
    multiply,
    power,
    prob_of,
    product,
    scale,
)
from .errors import (
    BatchTooLarge,
    CounterexampleMismatch,
    DiscinfoError,
    MissingQDistribution,
    NonPositiveProbability,
    SupportMismatch,
    UnknownVariable,
    ZeroEvidence,
    ZeroProbabilityEvent,
)
from .expr import ParseError, evaluate, format_expression, parse
from .identities import (
    Expectation,
    IdentitySuite,
    SearchReport,
    SuiteEntry,
    WitnessReport,
    chaining_distribution,
    check_suite,
    default_suite,
    parse_suite_file,
    three_cell_distribution,
    verify_reference_witnesses,
)
from .quantities import (
    DiagramTable,
    LogBase,
    Query,
    QueryKind,
    Term,
    cross_entropy,
    diagram,
    entropy,
    evaluate_query,
    expected_marginal_ic,
    information_content,
    kl_divergence,
    mutual_info,
    triple_mi,
)
from .simulate import SimConfig, SimResult, run_sim, threshold_task
from .stirling import StirlingReport, log_binomial_exact, log_binomial_sweep, stirling_bound

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BatchTooLarge",
    "BayesModel",
    "CounterexampleMismatch",
    "CsdDecomposition",
    "Dataset",
    "DiagramTable",
    "DiscinfoError",
    "ElboVAEResult",
    "ElboVIResult",
    "Expectation",
    "IdentitySuite",
    "JointDistribution",
    "LatentVarModel",
    "LogBase",
    "MissingQDistribution",
    "NonPositiveProbability",
    "ParseError",
    "Posterior",
    "Query",
    "QueryKind",
    "SearchReport",
    "SimConfig",
    "SimResult",
    "StirlingReport",
    "SuiteEntry",
    "SupportMismatch",
    "Term",
    "UnknownVariable",
    "UnnormalizedWeight",
    "Variable",
    "WitnessReport",
    "ZeroEvidence",
    "ZeroProbabilityEvent",
    "bald",
    "batch_score",
    "chaining_distribution",
    "check_suite",
    "condition",
    "cross_entropy",
    "csd",
    "csd_decomposition",
    "default_suite",
    "diagram",
    "dump_distribution",
    "elbo_vae",
    "elbo_vi",
    "entropy",
    "evaluate",
    "evaluate_query",
    "expected_marginal_ic",
    "format_expression",
    "information_content",
    "joint_label_hypothesis",
    "kl_divergence",
    "load_distribution",
    "load_model",
    "log_binomial_exact",
    "log_binomial_sweep",
    "log_evidence",
    "marginalize",
    "mixture",
    "multiply",
    "mutual_info",
    "parse",
    "parse_suite_file",
    "posterior",
    "power",
    "predictive",
    "prob_of",
    "product",
    "run_sim",
    "scale",
    "stirling_bound",
    "surprise",
    "three_cell_distribution",
    "threshold_task",
    "triple_mi",
    "update",
    "verify_reference_witnesses",
]
