"""bntrim: trim features from a discrete Bayesian network classifier under
a cost budget while keeping its decisions as close as possible to the
original, by re-tuning the decision threshold.

The core pipeline: build or learn a network (:mod:`bntrim.netio`,
:mod:`bntrim.evalharness`), measure how well a feature subset can mimic
the full classifier (:mod:`bntrim.agreement`), and search the subsets
under a budget (:mod:`bntrim.trimsearch`).  Brute-force oracles live in
:mod:`bntrim.baselines`; the ``bntrim`` command in :mod:`bntrim.cli`.
"""

from .agreement import (
    InstanceRow,
    InstanceTable,
    MaaResult,
    ThresholdInterval,
    build_instance_table,
    compute_maa,
    eca,
    esdp_two_threshold,
    maa,
    mpa,
    sdp,
)
from .baselines import (
    SelectionReport,
    eca_bruteforce,
    ig_report,
    ig_select,
    info_gain,
    maa_bruteforce,
)
from .bnmodel import (
    BayesianNetwork,
    Classifier,
    CostModel,
    Cpt,
    Variable,
    check_classifier,
    check_network,
    cond_independent_given_class,
    is_naive_bayes,
    validate_network,
)
from .errors import (
    BntrimError,
    EnumerationLimitError,
    ModelError,
    ParseError,
    UsageError,
    ZeroEvidenceError,
)
from .evalharness import (
    EvalConfig,
    ScatterRow,
    cv_accuracy,
    empirical_agreement,
    enumerate_feasible,
    learn_nb,
    sample_rows,
    scatter,
    synthesize_dataset,
    write_scatter_csv,
)
from .inference import (
    LogOddsModel,
    assignment_from_labels,
    build_log_odds_model,
    classify,
    decide_at,
    joint_prob,
    log_odds_classify,
    marginal,
    nb_log_odds,
    posterior_class,
)
from .netio import (
    Dataset,
    parse_dataset,
    parse_network,
    serialize_dataset,
    serialize_network,
)
from .trimsearch import (
    SearchOptions,
    SearchStats,
    TraceEvent,
    TrimResult,
    eca_trim,
    exhaustive_trim,
    nb_trim,
)

__version__ = "0.1.0"

__all__ = [
    "BayesianNetwork",
    "BntrimError",
    "Classifier",
    "CostModel",
    "Cpt",
    "Dataset",
    "EnumerationLimitError",
    "EvalConfig",
    "InstanceRow",
    "InstanceTable",
    "LogOddsModel",
    "MaaResult",
    "ModelError",
    "ParseError",
    "ScatterRow",
    "SearchOptions",
    "SearchStats",
    "SelectionReport",
    "ThresholdInterval",
    "TraceEvent",
    "TrimResult",
    "UsageError",
    "Variable",
    "ZeroEvidenceError",
    "assignment_from_labels",
    "build_instance_table",
    "build_log_odds_model",
    "check_classifier",
    "check_network",
    "classify",
    "compute_maa",
    "cond_independent_given_class",
    "cv_accuracy",
    "decide_at",
    "eca",
    "eca_bruteforce",
    "eca_trim",
    "empirical_agreement",
    "enumerate_feasible",
    "esdp_two_threshold",
    "exhaustive_trim",
    "ig_report",
    "ig_select",
    "info_gain",
    "is_naive_bayes",
    "joint_prob",
    "learn_nb",
    "log_odds_classify",
    "maa",
    "maa_bruteforce",
    "marginal",
    "mpa",
    "nb_log_odds",
    "nb_trim",
    "parse_dataset",
    "parse_network",
    "posterior_class",
    "sample_rows",
    "scatter",
    "sdp",
    "serialize_dataset",
    "serialize_network",
    "synthesize_dataset",
    "validate_network",
    "write_scatter_csv",
]
