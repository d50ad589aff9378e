"""Comparison strategies and brute-force oracles.

``info_gain``/``ig_select`` implement the classic mutual-information
feature ranking, computed from the model distribution (no data needed).
``eca_bruteforce`` and ``maa_bruteforce`` recompute agreement and best
agreement by literal enumeration over the full feature space; they share
no code with the instance-table path in :mod:`bntrim.agreement` and serve
as its ground truth in tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .agreement import eca, maa
from .bnmodel import BayesianNetwork, Classifier, CostModel, check_classifier
from .errors import EnumerationLimitError, ModelError
from .inference import classify, marginal, posterior_class
from .trimsearch import EXHAUSTIVE_LIMIT


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of one feature-selection strategy."""

    method: str
    chosen: tuple[str, ...]
    threshold: float
    achieved_eca: float
    scores: Mapping[str, float]


def info_gain(net: BayesianNetwork, clf: Classifier) -> dict[str, float]:
    """Mutual information I(class; feature) in bits, per feature.

    Terms with zero joint mass contribute nothing.  Keys follow the
    classifier's feature order.
    """
    check_classifier(net, clf)
    class_mass = [marginal(net, {clf.class_var: c}) for c in range(2)]
    out: dict[str, float] = {}
    for f in clf.features:
        card = net.var(f).cardinality
        feature_mass = [marginal(net, {f: v}) for v in range(card)]
        terms = []
        for c in range(2):
            for v in range(card):
                joint = marginal(net, {clf.class_var: c, f: v})
                if joint > 0.0:
                    terms.append(joint * math.log2(joint / (class_mass[c] * feature_mass[v])))
        out[f] = math.fsum(terms)
    return out


def ig_select(scores: Mapping[str, float], costs: CostModel) -> tuple[str, ...]:
    """Greedy selection by descending score under the budget.

    Features that no longer fit the remaining budget are skipped; ties
    break toward the earlier feature in the mapping's order.  The chosen
    features are returned in the mapping's order.
    """
    names = list(scores)
    index = {f: i for i, f in enumerate(names)}
    remaining = costs.budget
    chosen: set[str] = set()
    for f in sorted(names, key=lambda f: (-scores[f], index[f])):
        cost = costs.cost_of(f)
        if cost <= remaining:
            chosen.add(f)
            remaining -= cost
    return tuple(f for f in names if f in chosen)


def ig_report(
    net: BayesianNetwork,
    clf: Classifier,
    costs: CostModel,
    retune_threshold: bool = False,
) -> SelectionReport:
    """Information-gain selection plus its achieved agreement.

    By default the original threshold is kept when scoring the selection;
    with ``retune_threshold`` the selection is scored at its best
    achievable agreement instead (a stronger baseline).
    """
    scores = info_gain(net, clf)
    chosen = ig_select(scores, costs)
    if retune_threshold:
        result = maa(net, clf, chosen)
        return SelectionReport(
            "information-gain+retune", chosen, result.interval.representative,
            result.score, scores,
        )
    achieved = eca(net, clf, replace(clf, features=chosen))
    return SelectionReport("information-gain", chosen, clf.threshold, achieved, scores)


def _feature_space(net: BayesianNetwork, features: Iterable[str]) -> int:
    size = 1
    for f in features:
        size *= net.var(f).cardinality
    return size


def _check_trimming(net: BayesianNetwork, alpha: Classifier, beta: Classifier) -> None:
    check_classifier(net, alpha)
    if beta.class_var != alpha.class_var or beta.positive_value != alpha.positive_value:
        raise ModelError("trimmed classifier must keep the class variable and positive value")
    extra = set(beta.features) - set(alpha.features)
    if extra:
        raise ModelError(f"trimmed classifier uses features not in the original: {sorted(extra)}")


def eca_bruteforce(net: BayesianNetwork, alpha: Classifier, beta: Classifier) -> float:
    """Agreement by literal enumeration: sum Pr(f) over every full
    feature instantiation on which both classifiers decide alike."""
    _check_trimming(net, alpha, beta)
    space = _feature_space(net, alpha.features)
    if space > EXHAUSTIVE_LIMIT:
        raise EnumerationLimitError(
            f"feature space of {space} instantiations exceeds the enumeration guard"
        )
    beta_set = set(beta.features)
    decisions: dict[tuple[int, ...], bool] = {}
    terms = []
    for combo in itertools.product(
        *(range(net.var(f).cardinality) for f in alpha.features)
    ):
        full = dict(zip(alpha.features, combo))
        mass = marginal(net, full)
        if mass == 0.0:
            continue
        # The trimmed decision depends only on the kept sub-assignment,
        # so compute it once per distinct one.
        kept_combo = tuple(v for f, v in zip(alpha.features, combo) if f in beta_set)
        trimmed = decisions.get(kept_combo)
        if trimmed is None:
            kept = {f: v for f, v in full.items() if f in beta_set}
            trimmed = classify(net, beta, kept)
            decisions[kept_combo] = trimmed
        # Reuse the evidence mass as the posterior denominator.
        full[alpha.class_var] = alpha.positive_value
        original = marginal(net, full) / mass >= alpha.threshold
        if original == trimmed:
            terms.append(mass)
    return math.fsum(terms)


def maa_bruteforce(
    net: BayesianNetwork, alpha: Classifier, kept: Iterable[str]
) -> tuple[float, float]:
    """Best agreement for a kept subset by trying every candidate
    threshold: each distinct attainable posterior, plus a value above all
    of them ("classify everything negative").

    Returns (score, threshold); ties resolve to the lowest candidate.
    """
    check_classifier(net, alpha)
    kept_set = set(kept)
    extra = kept_set - set(alpha.features)
    if extra:
        raise ModelError(f"kept set names non-features: {sorted(extra)}")
    kept_t = tuple(f for f in alpha.features if f in kept_set)

    posteriors = []
    for combo in itertools.product(*(range(net.var(f).cardinality) for f in kept_t)):
        evidence = dict(zip(kept_t, combo))
        if marginal(net, evidence) == 0.0:
            continue
        posteriors.append(posterior_class(net, alpha, evidence))
    candidates = sorted(set(posteriors)) + [max(posteriors) + 1.0]

    best_score = -math.inf
    best_threshold = candidates[0]
    for t in candidates:
        score = eca_bruteforce(net, alpha, replace(alpha, features=kept_t, threshold=t))
        if score > best_score:
            best_score = score
            best_threshold = t
    return best_score, best_threshold
