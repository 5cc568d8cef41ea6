"""FDR-controlling multiple testing for discrete test statistics.

Step-up and step-down procedures (plain, midP and support-aware variants,
with optional Tarone-style selection), one-sided Fisher's exact tests with
their full attainable p-value supports, a midP FDR upper bound, an exact
enumeration oracle, and a Monte-Carlo study harness.
"""

from .bounds import MidFdrBound, epsilon, midfdr_upper_bound
from .datasets import DEMO_TABLES, counterexample_spec_path, counterexample_specs, demo_family
from .fisher import (
    ContingencyTable,
    TailDirection,
    attainable_support,
    fisher_exact,
    hypergeom_pmf,
    support_for_margins,
)
from .nulldist import (
    ATOL,
    NullDistribution,
    TestResult,
    cdf_at,
    degenerate,
    from_points,
    midp_distribution,
    min_achievable_significance,
)
from .oracle import (
    DEFAULT_OUTCOME_CAP,
    HypothesisSpec,
    OracleResult,
    OutcomeCapExceeded,
    exact_fdr,
)
from .procedures import (
    GUARANTEED_FDR_CONTROL,
    AdjustedPValues,
    Family,
    Procedure,
    TaroneSelection,
    adjust,
    bh_adjust,
    bl_adjust,
    dbh_adjust,
    dbl_adjust,
    dbl_critical_values,
    reject_at_level,
    tarone_midp_procedure,
    tarone_select,
)
from .simulation import (
    STUDY_PROCEDURES,
    SimulationConfig,
    SimulationSummary,
    generate_replicate,
    run_study,
    sweep,
    write_sweep_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ATOL",
    "DEFAULT_OUTCOME_CAP",
    "DEMO_TABLES",
    "GUARANTEED_FDR_CONTROL",
    "STUDY_PROCEDURES",
    "AdjustedPValues",
    "ContingencyTable",
    "Family",
    "HypothesisSpec",
    "MidFdrBound",
    "NullDistribution",
    "OracleResult",
    "OutcomeCapExceeded",
    "Procedure",
    "SimulationConfig",
    "SimulationSummary",
    "TailDirection",
    "TaroneSelection",
    "TestResult",
    "adjust",
    "attainable_support",
    "bh_adjust",
    "bl_adjust",
    "cdf_at",
    "counterexample_spec_path",
    "counterexample_specs",
    "dbh_adjust",
    "dbl_adjust",
    "dbl_critical_values",
    "degenerate",
    "demo_family",
    "epsilon",
    "exact_fdr",
    "fisher_exact",
    "from_points",
    "generate_replicate",
    "hypergeom_pmf",
    "midfdr_upper_bound",
    "midp_distribution",
    "min_achievable_significance",
    "reject_at_level",
    "run_study",
    "support_for_margins",
    "sweep",
    "tarone_midp_procedure",
    "tarone_select",
    "write_sweep_csv",
]
