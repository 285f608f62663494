"""Copeland-winner identification benchmark for dueling bandits whose duels
can end in strict preference either way or in indifference.

Layout:
  instance   preference instances, Copeland profiles, validation, transitivity
  ppr        sequential mode test for one pair, stopping boundary, sample caps
  solvers    the two identification loops and their score-update rules
  bounds     lower/upper sample-complexity bounds, worst-case constructor
  envgen     seeded oracles and instance generators
  cli        benchmark command line (`copelandbench ...`)

The per-duel sampling loop runs in a compiled kernel when the extension built;
set COPELANDBENCH_BACKEND=py to force the pure-Python fallback (or =c to
require the extension).  Both produce bit-identical results.
"""

from .instance import (
    CopelandProfile,
    PreferenceInstance,
    PreferenceTriple,
    RelationSets,
    TransitivityReport,
    ValidationReport,
    check_transitivity,
    copeland_profile,
    min_gap,
    relation_sets,
    validate,
)
from .ppr import (
    BACKEND,
    BudgetExceeded,
    DegenerateGap,
    PprDecision,
    TernaryCounts,
    bernoulli_confidence_set_contains,
    log_beta_pdf_at_half,
    ppr_1v1_run,
    ppr_step,
    should_stop,
    stop_boundary,
    t0_bound,
)
from .solvers import (
    DuelRecord,
    RoundOverflow,
    RunTrace,
    SolverState,
    pocowista,
    scores_update,
    termination_check,
    tra_pocowista,
    transitive_scores_update,
)
from .bounds import (
    BoundReport,
    NotApplicable,
    ParameterOutOfRange,
    PreconditionViolated,
    PsiSets,
    bound_report,
    d_jk,
    kl_bernoulli,
    kl_categorical3,
    lower_bound_detailed,
    lower_bound_natural,
    lower_bound_no_indiff,
    lower_bound_simple,
    psi_sets,
    upper_bound_pocowista,
    upper_bound_tra_from_trace,
    worst_case_instance,
)
from .envgen import (
    PairChannel,
    RejectionBudgetExceeded,
    SeededOracle,
    gen_class,
    gen_transitive,
    load_instance,
    sample_feedback,
    save_instance,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundReport",
    "BudgetExceeded",
    "CopelandProfile",
    "DegenerateGap",
    "DuelRecord",
    "NotApplicable",
    "PairChannel",
    "ParameterOutOfRange",
    "PprDecision",
    "PreconditionViolated",
    "PreferenceInstance",
    "PreferenceTriple",
    "PsiSets",
    "RejectionBudgetExceeded",
    "RelationSets",
    "RoundOverflow",
    "RunTrace",
    "SeededOracle",
    "SolverState",
    "TernaryCounts",
    "TransitivityReport",
    "ValidationReport",
    "bernoulli_confidence_set_contains",
    "bound_report",
    "check_transitivity",
    "copeland_profile",
    "d_jk",
    "gen_class",
    "gen_transitive",
    "kl_bernoulli",
    "kl_categorical3",
    "load_instance",
    "log_beta_pdf_at_half",
    "lower_bound_detailed",
    "lower_bound_natural",
    "lower_bound_no_indiff",
    "lower_bound_simple",
    "min_gap",
    "pocowista",
    "ppr_1v1_run",
    "ppr_step",
    "psi_sets",
    "relation_sets",
    "sample_feedback",
    "save_instance",
    "scores_update",
    "should_stop",
    "stop_boundary",
    "t0_bound",
    "termination_check",
    "tra_pocowista",
    "transitive_scores_update",
    "upper_bound_pocowista",
    "upper_bound_tra_from_trace",
    "validate",
    "worst_case_instance",
]
