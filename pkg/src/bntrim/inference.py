"""Exact inference over discrete networks by enumeration.

An assignment maps variable names to value indices and may be partial.
The scalar operations here enumerate hidden variables directly; they are
intended for desk-scale networks (roughly 22 binary-equivalent variables)
where exactness matters more than speed.  Sums are accumulated with
``math.fsum`` so results do not depend on enumeration order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Mapping

from .bnmodel import BayesianNetwork, Classifier, check_classifier, check_network, is_naive_bayes
from .errors import ModelError, ZeroEvidenceError

Assignment = Mapping[str, int]


def assignment_from_labels(net: BayesianNetwork, labels: Mapping[str, str]) -> dict[str, int]:
    """Convert {variable: value-label} into {variable: value-index}."""
    return {name: net.var(name).index_of(lab) for name, lab in labels.items()}


def _check_assignment(net: BayesianNetwork, a: Assignment) -> None:
    for name, idx in a.items():
        v = net.var(name)
        if not isinstance(idx, int) or not (0 <= idx < v.cardinality):
            raise ModelError(f"value index {idx!r} out of range for {name!r}")


def joint_prob(net: BayesianNetwork, a: Assignment) -> float:
    """Probability of one full assignment: the product of CPT entries."""
    check_network(net)
    _check_assignment(net, a)
    if len(a) != len(net.variables):
        missing = [v.name for v in net.variables if v.name not in a]
        raise ModelError(f"full assignment required, missing {missing}")
    p = 1.0
    for v in net.variables:
        cpt = net.cpt(v.name)
        row = 0
        for parent in cpt.parents:
            row = row * net.var(parent).cardinality + a[parent]
        p *= cpt.rows[row][a[v.name]]
        if p == 0.0:
            return 0.0
    return p


def marginal(net: BayesianNetwork, a: Assignment) -> float:
    """Probability of a partial assignment: joint summed over completions."""
    check_network(net)
    _check_assignment(net, a)
    free = [v for v in net.variables if v.name not in a]
    names = [v.name for v in free]
    terms = []
    for combo in itertools.product(*(range(v.cardinality) for v in free)):
        full = dict(a)
        full.update(zip(names, combo))
        terms.append(joint_prob(net, full))
    return math.fsum(terms)


def posterior_class(net: BayesianNetwork, clf: Classifier, a: Assignment) -> float:
    """Posterior probability of the positive class value given evidence.

    The evidence must assign feature variables only.  Raises
    ZeroEvidenceError when the evidence has probability zero.
    """
    check_classifier(net, clf)
    bad = [n for n in a if n not in clf.features]
    if bad:
        raise ModelError(f"evidence names non-feature variables: {sorted(bad)}")
    pe = marginal(net, a)
    if pe == 0.0:
        raise ZeroEvidenceError(f"evidence {dict(a)!r} has probability 0")
    joint = dict(a)
    joint[clf.class_var] = clf.positive_value
    return marginal(net, joint) / pe


def classify(net: BayesianNetwork, clf: Classifier, a: Assignment) -> bool:
    """True when the posterior of the positive value meets the threshold.

    The comparison is an exact >=; no epsilon is applied.  Evidence may be
    partial, in which case the decision is based on the posterior given
    the observed features alone.
    """
    return posterior_class(net, clf, a) >= clf.threshold


def decide_at(net: BayesianNetwork, clf: Classifier, a: Assignment, threshold: float) -> bool:
    """classify() under the same classifier but a different threshold."""
    return classify(net, replace(clf, threshold=threshold), a)


def _log_ratio(p: float, q: float) -> float:
    if p > 0.0 and q > 0.0:
        return math.log(p / q)
    if p == 0.0 and q > 0.0:
        return -math.inf
    if p > 0.0 and q == 0.0:
        return math.inf
    return math.nan  # value impossible under both classes


@dataclass(frozen=True)
class LogOddsModel:
    """Additive log-odds form of a naive Bayes classifier.

    The instance score is the prior log-odds plus one weight per observed
    feature value; the instance is positive when the score is >= the
    threshold log-odds.  Weights for zero-probability entries are signed
    infinities, which keeps the decision well defined.
    """

    class_var: str
    positive_value: int
    prior_log_odds: float
    weights: Mapping[str, tuple[float, ...]]
    threshold_log_odds: float


def build_log_odds_model(net: BayesianNetwork, clf: Classifier) -> LogOddsModel:
    """Rewrite a naive Bayes classifier in additive log-odds form."""
    if not is_naive_bayes(net, clf):
        raise ModelError("log-odds form requires a naive Bayes structure")
    if not (0.0 <= clf.threshold <= 1.0):
        raise ModelError("log-odds form requires a threshold in [0, 1]")
    prior_row = net.cpt(clf.class_var).rows[0]
    pos = prior_row[clf.positive_value]
    neg = prior_row[1 - clf.positive_value]
    weights: dict[str, tuple[float, ...]] = {}
    for f in clf.features:
        rows = net.cpt(f).rows
        pos_row = rows[clf.positive_value]
        neg_row = rows[1 - clf.positive_value]
        weights[f] = tuple(_log_ratio(p, q) for p, q in zip(pos_row, neg_row))
    if clf.threshold == 0.0:
        lam = -math.inf
    elif clf.threshold == 1.0:
        lam = math.inf
    else:
        lam = math.log(clf.threshold / (1.0 - clf.threshold))
    return LogOddsModel(clf.class_var, clf.positive_value, _log_ratio(pos, neg), weights, lam)


def nb_log_odds(model: LogOddsModel, a: Assignment) -> float:
    """Log-odds score of an assignment over the model's features.

    A NaN result means the instance has probability zero under both
    classes and carries no usable evidence.
    """
    s = model.prior_log_odds
    for name, idx in a.items():
        try:
            w = model.weights[name]
        except KeyError:
            raise ModelError(f"unknown feature {name!r}") from None
        s += w[idx]
    return s


def log_odds_classify(model: LogOddsModel, a: Assignment) -> bool:
    """Threshold the log-odds score; equivalent to classify() on the
    posterior path, including at exact ties."""
    return nb_log_odds(model, a) >= model.threshold_log_odds
