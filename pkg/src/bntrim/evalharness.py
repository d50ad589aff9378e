"""Data-driven evaluation: learn a naive Bayes classifier from CSV rows,
score every feasible feature subset, and compare model-level agreement
against held-out behaviour.

The main entry point is :func:`scatter`: split the data, learn a
full-feature classifier on the training part, then for every within-budget
subset report its agreement with the full classifier (``eca`` column) next
to its k-fold cross-validated accuracy on the training part.  The summary
evaluates the best-agreement and best-accuracy subsets on the held-out
part.

Also houses the seeded synthetic-data utilities: ancestral sampling from a
network, dataset synthesis, and the empirical agreement estimate used to
sanity-check the exact computation against simulation.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .agreement import eca, maa
from .bnmodel import (
    BayesianNetwork,
    Classifier,
    CostModel,
    Cpt,
    Variable,
    check_classifier,
)
from .errors import EnumerationLimitError, ModelError
from .inference import classify
from .netio import Dataset
from .trimsearch import EXHAUSTIVE_LIMIT

THRESHOLD_MODES = ("maa-optimal", "fixed")


@dataclass(frozen=True)
class EvalConfig:
    """Knobs for the evaluation harness.

    ``thresholds[0]`` is both the learned classifier's decision threshold
    and the scoring threshold in "fixed" mode; additional entries are
    accepted but unused by :func:`scatter`.  The budget is ``budget`` when
    given, otherwise ``ceil(budget_fraction * feature count)``.
    """

    split_fraction: float = 0.8
    folds: int = 10
    seed: int = 0
    smoothing: float = 1.0
    budget: float | None = None
    budget_fraction: float = 0.5
    thresholds: tuple[float, ...] = (0.5,)
    threshold_mode: str = "maa-optimal"
    jobs: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.split_fraction < 1.0:
            raise ModelError(f"split fraction must be in (0,1), got {self.split_fraction}")
        if self.folds < 2:
            raise ModelError(f"fold count must be >= 2, got {self.folds}")
        if self.smoothing < 0.0:
            raise ModelError(f"smoothing must be >= 0, got {self.smoothing}")
        if self.budget is not None and self.budget < 0.0:
            raise ModelError(f"budget must be >= 0, got {self.budget}")
        if not 0.0 < self.budget_fraction <= 1.0:
            raise ModelError(f"budget fraction must be in (0,1], got {self.budget_fraction}")
        if not self.thresholds:
            raise ModelError("at least one threshold is required")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ModelError(
                f"unknown threshold mode {self.threshold_mode!r}; choose from {THRESHOLD_MODES}"
            )
        if self.jobs < 1:
            raise ModelError(f"job count must be >= 1, got {self.jobs}")

    def resolve_budget(self, feature_count: int) -> float:
        if self.budget is not None:
            return self.budget
        return float(math.ceil(self.budget_fraction * feature_count))


@dataclass(frozen=True)
class ScatterRow:
    subset: tuple[str, ...]
    eca: float
    cv_accuracy: float
    marker: str  # "feasible" | "optimal-eca" | "optimal-accuracy" | "optimal-both"


def _column_domains(data: Dataset, columns: Iterable[str]) -> dict[str, tuple[str, ...]]:
    return {c: tuple(sorted(set(data.column_values(c)))) for c in columns}


def learn_nb(
    data: Dataset,
    class_column: str | None = None,
    smoothing: float = 1.0,
    domains: Mapping[str, tuple[str, ...]] | None = None,
    positive_label: str | None = None,
    threshold: float = 0.5,
) -> tuple[BayesianNetwork, Classifier]:
    """Estimate a naive Bayes classifier from a dataset.

    Every CPT cell gets additive smoothing: Pr(f=v|c) is
    (count + smoothing) / (class count + smoothing * domain size), and the
    class prior is smoothed the same way.  ``domains`` fixes each column's
    value vocabulary (needed when a subsample may miss values); by default
    the vocabularies are the sorted distinct values in the data.  The
    positive label defaults to the later class value in sorted order.
    """
    if class_column is None:
        class_column = data.class_column
    if not data.rows:
        raise ModelError("cannot learn from an empty dataset")
    if smoothing < 0.0:
        raise ModelError(f"smoothing must be >= 0, got {smoothing}")
    columns = [class_column] + [c for c in data.columns if c != class_column]
    if domains is None:
        domains = _column_domains(data, columns)
    else:
        missing = [c for c in columns if c not in domains]
        if missing:
            raise ModelError(f"domains missing columns: {missing}")
        for c in columns:
            seen = set(data.column_values(c))
            unknown = seen - set(domains[c])
            if unknown:
                raise ModelError(f"column {c!r} has values outside its domain: {sorted(unknown)}")
    class_domain = domains[class_column]
    if len(class_domain) != 2:
        raise ModelError(
            f"class column {class_column!r} must be binary, has values {list(class_domain)}"
        )
    if positive_label is None:
        positive_value = 1
    else:
        if positive_label not in class_domain:
            raise ModelError(f"positive label {positive_label!r} not a class value")
        positive_value = class_domain.index(positive_label)

    n = len(data.rows)
    class_cells = data.column_values(class_column)
    class_count = {v: class_cells.count(v) for v in class_domain}
    if smoothing == 0.0 and min(class_count.values()) == 0:
        raise ModelError("a class value never occurs and smoothing is 0")

    variables = [Variable(c, tuple(domains[c])) for c in columns]
    prior_denom = n + smoothing * 2
    prior = tuple((class_count[v] + smoothing) / prior_denom for v in class_domain)
    cpts = [Cpt(class_column, (), (prior,))]
    features = [c for c in columns if c != class_column]
    for f in features:
        cells = data.column_values(f)
        card = len(domains[f])
        rows = []
        for cval in class_domain:
            counts = {v: 0 for v in domains[f]}
            for cell, ccell in zip(cells, class_cells):
                if ccell == cval:
                    counts[cell] += 1
            denom = class_count[cval] + smoothing * card
            rows.append(tuple((counts[v] + smoothing) / denom for v in domains[f]))
        cpts.append(Cpt(f, (class_column,), tuple(rows)))
    net = BayesianNetwork(tuple(variables), tuple(cpts))
    clf = Classifier(class_column, positive_value, tuple(features), threshold)
    check_classifier(net, clf)
    return net, clf


def enumerate_feasible(clf: Classifier, costs: CostModel) -> list[tuple[str, ...]]:
    """Every feature subset whose total cost fits the budget, smaller
    subsets first, then lexicographic in classifier feature order."""
    n = len(clf.features)
    if 1 << n > EXHAUSTIVE_LIMIT:
        raise EnumerationLimitError(f"2^{n} subsets exceed the enumeration guard")
    out = []
    for size in range(n + 1):
        for combo in itertools.combinations(clf.features, size):
            if costs.total(combo) <= costs.budget:
                out.append(combo)
    return out


def _row_evidence(
    data: Dataset, domains: Mapping[str, tuple[str, ...]], row: Sequence[str],
    features: Iterable[str],
) -> dict[str, int]:
    return {
        f: domains[f].index(row[data.column_index(f)])
        for f in features
    }


def cv_accuracy(
    data: Dataset,
    subset: Iterable[str],
    folds: int,
    seed: int,
    smoothing: float = 1.0,
    positive_label: str | None = None,
    threshold: float = 0.5,
) -> float:
    """Mean stratified k-fold accuracy of a naive Bayes classifier over
    the given feature subset.

    Folds are formed by shuffling each class's rows with the seeded RNG
    and dealing rows round-robin, the deal continuing across class groups
    so every fold is nonempty whenever folds <= rows.  Each fold's
    classifier is learned on the remaining rows (restricted to the subset)
    with value vocabularies taken from the full data.
    """
    subset_t = tuple(subset)
    work = data.restrict(list(subset_t))
    n = len(work.rows)
    if folds < 2:
        raise ModelError(f"fold count must be >= 2, got {folds}")
    if folds > n:
        raise ModelError(f"{folds} folds need at least {folds} rows, have {n}")
    domains = _column_domains(work, work.columns)
    class_idx = work.column_index(work.class_column)

    rng = random.Random(seed)
    by_class: dict[str, list[int]] = {v: [] for v in domains[work.class_column]}
    for i, row in enumerate(work.rows):
        by_class[row[class_idx]].append(i)
    fold_of = [0] * n
    cursor = 0
    for v in domains[work.class_column]:
        group = by_class[v]
        rng.shuffle(group)
        for i in group:
            fold_of[i] = cursor % folds
            cursor += 1

    features = [c for c in work.columns if c != work.class_column]
    accuracies = []
    for fold in range(folds):
        train_idx = [i for i in range(n) if fold_of[i] != fold]
        test_idx = [i for i in range(n) if fold_of[i] == fold]
        net, clf = learn_nb(
            work.take(train_idx), smoothing=smoothing, domains=domains,
            positive_label=positive_label, threshold=threshold,
        )
        hits = 0
        for i in test_idx:
            row = work.rows[i]
            evidence = _row_evidence(work, domains, row, features)
            actual = domains[work.class_column].index(row[class_idx]) == clf.positive_value
            hits += classify(net, clf, evidence) == actual
        accuracies.append(hits / len(test_idx))
    return math.fsum(accuracies) / folds


def _argmax_first(values: Sequence[float]) -> int:
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def scatter(
    data: Dataset,
    config: EvalConfig,
    positive_label: str | None = None,
    costs: CostModel | None = None,
) -> tuple[list[ScatterRow], dict]:
    """Agreement-vs-accuracy sweep over all feasible subsets.

    The data is split by a seeded permutation into training and held-out
    parts.  A full-feature classifier is learned on the training part;
    each feasible subset is scored by (a) its agreement with the full
    classifier — at the subset's best-agreement threshold by default, or
    at the fixed base threshold in "fixed" mode — and (b) its
    cross-validated accuracy on the training part at the base threshold.

    The summary reports, for the best-agreement and best-accuracy subsets,
    the fraction of held-out rows where the trimmed classifier matches the
    full classifier's label (at the subset's scoring threshold) and the
    fraction where it matches the actual label (at the base threshold).
    """
    n = len(data.rows)
    if n < 2:
        raise ModelError("scatter needs at least 2 rows")
    base_threshold = config.thresholds[0]
    domains = _column_domains(data, data.columns)

    rng = random.Random(config.seed)
    perm = list(range(n))
    rng.shuffle(perm)
    train_n = min(max(round(config.split_fraction * n), 1), n - 1)
    train = data.take(perm[:train_n])
    test = data.take(perm[train_n:])

    net, clf_full = learn_nb(
        train, smoothing=config.smoothing, domains=domains,
        positive_label=positive_label, threshold=base_threshold,
    )
    cost_model = costs or CostModel.unit(
        clf_full.features, config.resolve_budget(len(clf_full.features))
    )
    subsets = enumerate_feasible(clf_full, cost_model)

    def score(subset: tuple[str, ...]) -> tuple[float, float, float]:
        if config.threshold_mode == "maa-optimal":
            result = maa(net, clf_full, subset)
            agreement, subset_threshold = result.score, result.interval.representative
        else:
            subset_threshold = base_threshold
            agreement = eca(
                net, clf_full,
                replace(clf_full, features=subset, threshold=subset_threshold),
            )
        accuracy = cv_accuracy(
            train, subset, config.folds, config.seed, config.smoothing,
            positive_label, base_threshold,
        )
        return agreement, accuracy, subset_threshold

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            scored = list(pool.map(score, subsets))
    else:
        scored = [score(s) for s in subsets]

    best_eca = _argmax_first([s[0] for s in scored])
    best_acc = _argmax_first([s[1] for s in scored])
    rows = []
    for i, (subset, (agreement, accuracy, _)) in enumerate(zip(subsets, scored)):
        if i == best_eca and i == best_acc:
            marker = "optimal-both"
        elif i == best_eca:
            marker = "optimal-eca"
        elif i == best_acc:
            marker = "optimal-accuracy"
        else:
            marker = "feasible"
        rows.append(ScatterRow(subset, agreement, accuracy, marker))

    features = clf_full.features
    full_labels = [
        classify(net, clf_full, _row_evidence(test, domains, row, features))
        for row in test.rows
    ]
    class_idx = test.column_index(test.class_column)
    actual_labels = [
        domains[test.class_column].index(row[class_idx]) == clf_full.positive_value
        for row in test.rows
    ]

    def held_out(i: int) -> dict:
        subset, (_, _, subset_threshold) = subsets[i], scored[i]
        scoring_clf = replace(clf_full, features=subset, threshold=subset_threshold)
        accuracy_clf = replace(clf_full, features=subset, threshold=base_threshold)
        agree = hits = 0
        for row, full_label, actual in zip(test.rows, full_labels, actual_labels):
            evidence = _row_evidence(test, domains, row, subset)
            agree += classify(net, scoring_clf, evidence) == full_label
            hits += classify(net, accuracy_clf, evidence) == actual
        return {
            "subset": list(subset),
            "test_agreement": agree / len(test.rows),
            "test_accuracy": hits / len(test.rows),
        }

    summary = {
        "optimal_eca": held_out(best_eca),
        "optimal_accuracy": held_out(best_acc),
    }
    return rows, summary


def write_scatter_csv(rows: Iterable[ScatterRow]) -> bytes:
    """CSV rendering of scatter rows; subsets are ';'-joined, floats are
    printed with 12 significant digits, lines end with LF."""
    out = ["subset,eca,cv_accuracy,marker"]
    for r in rows:
        out.append(
            f"{';'.join(r.subset)},{format(r.eca, '.12g')},"
            f"{format(r.cv_accuracy, '.12g')},{r.marker}"
        )
    return ("\n".join(out) + "\n").encode("utf-8")


def sample_rows(net: BayesianNetwork, count: int, seed: int) -> list[dict[str, int]]:
    """Ancestral sampling: draw full assignments in topological order."""
    order = net.order
    if order is None:
        raise ModelError("network is not a DAG")
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        a: dict[str, int] = {}
        for name in order:
            cpt = net.cpt(name)
            row = 0
            for parent in cpt.parents:
                row = row * net.var(parent).cardinality + a[parent]
            probs = cpt.rows[row]
            u = rng.random()
            acc = 0.0
            value = len(probs) - 1
            for i, p in enumerate(probs):
                acc += p
                if u < acc:
                    value = i
                    break
            a[name] = value
        out.append(a)
    return out


def synthesize_dataset(
    net: BayesianNetwork, class_column: str, count: int, seed: int
) -> Dataset:
    """A dataset of ancestral samples, with variable values written as
    their declared labels and columns in network declaration order."""
    names = [v.name for v in net.variables]
    rows = tuple(
        tuple(net.var(name).values[a[name]] for name in names)
        for a in sample_rows(net, count, seed)
    )
    return Dataset(tuple(names), rows, class_column)


def empirical_agreement(
    net: BayesianNetwork,
    alpha: Classifier,
    beta: Classifier,
    count: int,
    seed: int,
) -> float:
    """Monte-Carlo estimate of agreement: the fraction of sampled
    instances both classifiers label identically."""
    check_classifier(net, alpha)
    check_classifier(net, beta)
    cache: dict[tuple[int, ...], bool] = {}
    agree = 0
    for a in sample_rows(net, count, seed):
        key = tuple(a[f] for f in alpha.features) + tuple(a[f] for f in beta.features)
        hit = cache.get(key)
        if hit is None:
            full = {f: a[f] for f in alpha.features}
            kept = {f: a[f] for f in beta.features}
            hit = classify(net, alpha, full) == classify(net, beta, kept)
            cache[key] = hit
        agree += hit
    return agree / count
