"""Shared fixtures: the two bundled example networks plus seeded random
instance generators used by the property and acceptance tests."""

from __future__ import annotations

import math
import pathlib
import random

import pytest

from bntrim import (
    BayesianNetwork,
    Classifier,
    CostModel,
    Cpt,
    Variable,
    check_classifier,
    parse_network,
)

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load_network(name: str) -> BayesianNetwork:
    return parse_network((FIXTURES / name).read_bytes())


@pytest.fixture(scope="session")
def quiz_net() -> BayesianNetwork:
    return load_network("quiz.bn.json")


@pytest.fixture(scope="session")
def quiz_alpha() -> Classifier:
    return Classifier("C", 0, ("Q1", "Q2", "Q3"), 0.07)


@pytest.fixture(scope="session")
def gbn4_net() -> BayesianNetwork:
    return load_network("gbn4.bn.json")


@pytest.fixture(scope="session")
def gbn4_alpha() -> Classifier:
    return Classifier("C", 0, ("F1", "F2", "F3"), 0.55)


def _random_rows(rng: random.Random, n_rows: int, card: int) -> tuple[tuple[float, ...], ...]:
    rows = []
    for _ in range(n_rows):
        weights = [rng.uniform(0.05, 1.0) for _ in range(card)]
        total = math.fsum(weights)
        rows.append(tuple(w / total for w in weights))
    return tuple(rows)


def nb_instance(
    rng: random.Random, n_features: int, max_card: int = 3
) -> tuple[BayesianNetwork, Classifier]:
    """A random naive Bayes network with exactly ``n_features`` features
    plus a classifier over all of them."""
    names = [f"X{i}" for i in range(1, n_features + 1)]
    variables = [Variable("C", ("neg", "pos"))]
    cpds = [Cpt("C", (), _random_rows(rng, 1, 2))]
    for name in names:
        card = rng.randint(2, max_card)
        variables.append(Variable(name, tuple(f"v{j}" for j in range(card))))
        cpds.append(Cpt(name, ("C",), _random_rows(rng, 2, card)))
    net = BayesianNetwork(tuple(variables), tuple(cpds))
    clf = Classifier("C", rng.randrange(2), tuple(names), rng.uniform(0.1, 0.9))
    check_classifier(net, clf)
    return net, clf


def random_nb_instance(
    rng: random.Random, max_features: int = 8, max_card: int = 3
) -> tuple[BayesianNetwork, Classifier]:
    """A random naive Bayes network plus a classifier over all features."""
    return nb_instance(rng, rng.randint(2, max_features), max_card)


def random_dag_instance(
    rng: random.Random, max_features: int = 8, max_card: int = 3
) -> tuple[BayesianNetwork, Classifier]:
    """A random general DAG over the class and features; every non-class
    variable is a classifier feature, and the class may have parents."""
    n = rng.randint(2, max_features)
    names = ["C"] + [f"X{i}" for i in range(1, n + 1)]
    cards = {"C": 2}
    for name in names[1:]:
        cards[name] = rng.randint(2, max_card)
    topo = names[:]
    rng.shuffle(topo)
    cpds = []
    for i, child in enumerate(topo):
        pool = topo[:i]
        k = min(len(pool), rng.randint(0, 2))
        parents = tuple(sorted(rng.sample(pool, k))) if k else ()
        n_rows = math.prod(cards[p] for p in parents)
        cpds.append(Cpt(child, parents, _random_rows(rng, n_rows, cards[child])))
    variables = tuple(Variable(m, tuple(f"v{j}" for j in range(cards[m]))) for m in names)
    net = BayesianNetwork(variables, tuple(cpds))
    clf = Classifier("C", rng.randrange(2), tuple(names[1:]), rng.uniform(0.1, 0.9))
    check_classifier(net, clf)
    return net, clf


def random_instance(
    rng: random.Random, index: int, max_features: int = 8, max_card: int = 3
) -> tuple[BayesianNetwork, Classifier]:
    """Alternate between naive Bayes and general-DAG instances."""
    if index % 2 == 0:
        return random_nb_instance(rng, max_features, max_card)
    return random_dag_instance(rng, max_features, max_card)


def random_costs(rng: random.Random, clf: Classifier) -> CostModel:
    costs = {f: float(rng.choice((1, 2, 3))) for f in clf.features}
    budget = rng.uniform(0.0, math.fsum(costs.values()))
    return CostModel(costs, budget)


def random_subset(rng: random.Random, clf: Classifier) -> tuple[str, ...]:
    return tuple(f for f in clf.features if rng.random() < 0.5)
