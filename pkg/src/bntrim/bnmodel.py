"""Core types for discrete Bayesian networks and binary threshold classifiers.

A network is a DAG of discrete variables with one conditional probability
table (CPT) per variable.  CPT rows are laid out row-major over the parent
list with the *last* parent varying fastest.  A classifier designates a
binary class variable, the index of its positive value, an ordered tuple of
feature variables, and a decision threshold: an instance is labelled
positive exactly when the posterior probability of the positive value is
greater than or equal to the threshold.

All types are immutable after construction and safe to share across
threads.  Structural validity (acyclicity, row sums, references) is checked
by :func:`validate_network`, which reports violations instead of raising so
that broken documents can be diagnosed.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ModelError

# Tolerance for CPT row-sum validation.
ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered tuple of value labels."""

    name: str
    values: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if not self.name:
            raise ModelError("variable name must be nonempty")
        if len(self.values) < 2:
            raise ModelError(f"variable {self.name!r} needs at least 2 values")
        if len(set(self.values)) != len(self.values):
            raise ModelError(f"variable {self.name!r} has duplicate value labels")

    @property
    def cardinality(self) -> int:
        return len(self.values)

    def index_of(self, label: str) -> int:
        try:
            return self.values.index(label)
        except ValueError:
            raise ModelError(
                f"variable {self.name!r} has no value {label!r}"
            ) from None


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table of one child variable.

    ``rows[r][v]`` is the probability that the child takes its v-th value
    given the r-th parent configuration.  Parent configurations are
    enumerated row-major with the last parent varying fastest.
    """

    child: str
    parents: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "rows", tuple(tuple(float(x) for x in row) for row in self.rows)
        )


@dataclass(frozen=True)
class BayesianNetwork:
    """A set of variables plus one CPT per variable.

    ``order`` is a cached topological order of the variable names, or None
    when the structure is cyclic or otherwise unresolvable; use
    :func:`validate_network` to find out why.
    """

    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]
    _var_map: dict = field(init=False, repr=False, compare=False)
    _cpt_map: dict = field(init=False, repr=False, compare=False)
    _children: dict = field(init=False, repr=False, compare=False)
    order: tuple[str, ...] | None = field(init=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))
        var_map: dict[str, Variable] = {}
        for v in self.variables:
            var_map.setdefault(v.name, v)
        cpt_map: dict[str, Cpt] = {}
        for c in self.cpts:
            cpt_map.setdefault(c.child, c)
        children: dict[str, tuple[str, ...]] = {name: () for name in var_map}
        for c in self.cpts:
            for p in c.parents:
                if p in children and c.child in var_map:
                    children[p] = children[p] + (c.child,)
        object.__setattr__(self, "_var_map", var_map)
        object.__setattr__(self, "_cpt_map", cpt_map)
        object.__setattr__(self, "_children", children)
        object.__setattr__(self, "order", self._topological_order())

    def _topological_order(self) -> tuple[str, ...] | None:
        # Kahn's algorithm; ties resolved by declaration order so the
        # result is deterministic.  None signals a cycle or a reference
        # that cannot be resolved.
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            return None
        indeg: dict[str, int] = {}
        for name in names:
            cpt = self._cpt_map.get(name)
            if cpt is None:
                return None
            if any(p not in self._var_map for p in cpt.parents):
                return None
            indeg[name] = len(cpt.parents)
        ready = deque(n for n in names if indeg[n] == 0)
        out: list[str] = []
        while ready:
            n = ready.popleft()
            out.append(n)
            for ch in self._children[n]:
                indeg[ch] -= 1
                if indeg[ch] == 0:
                    ready.append(ch)
        if len(out) != len(names):
            return None
        return tuple(out)

    def var(self, name: str) -> Variable:
        try:
            return self._var_map[name]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def cpt(self, name: str) -> Cpt:
        try:
            return self._cpt_map[name]
        except KeyError:
            raise ModelError(f"no cpt for variable {name!r}") from None

    def parents(self, name: str) -> tuple[str, ...]:
        return self.cpt(name).parents

    def children(self, name: str) -> tuple[str, ...]:
        self.var(name)
        return self._children[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)


@dataclass(frozen=True)
class Classifier:
    """A binary threshold classifier over a subset of network variables.

    ``positive_value`` is the index into the class variable's value tuple
    that is treated as the positive label.  ``threshold`` is normally in
    [0, 1]; values above 1 are admitted because an all-negative operating
    point is represented by any threshold exceeding every attainable
    posterior.
    """

    class_var: str
    positive_value: int
    features: tuple[str, ...]
    threshold: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "threshold", float(self.threshold))
        if len(set(self.features)) != len(self.features):
            raise ModelError("classifier features contain duplicates")
        if self.class_var in self.features:
            raise ModelError("class variable cannot be a feature")
        if not math.isfinite(self.threshold) or self.threshold < 0.0:
            raise ModelError(f"threshold must be a finite value >= 0, got {self.threshold}")
        if self.positive_value not in (0, 1):
            raise ModelError("positive_value must be 0 or 1 for a binary class")


@dataclass(frozen=True)
class CostModel:
    """Per-feature acquisition costs and a total budget."""

    costs: Mapping[str, float]
    budget: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "costs", dict(self.costs))
        object.__setattr__(self, "budget", float(self.budget))
        for name, c in self.costs.items():
            if not math.isfinite(c) or c <= 0.0:
                raise ModelError(f"cost of {name!r} must be positive, got {c}")
        if not math.isfinite(self.budget) or self.budget < 0.0:
            raise ModelError(f"budget must be >= 0, got {self.budget}")

    def cost_of(self, name: str) -> float:
        try:
            return self.costs[name]
        except KeyError:
            raise ModelError(f"no cost given for feature {name!r}") from None

    def total(self, names: Iterable[str]) -> float:
        return math.fsum(self.cost_of(n) for n in names)

    @classmethod
    def unit(cls, features: Iterable[str], budget: float) -> "CostModel":
        return cls({f: 1.0 for f in features}, budget)


def check_network(net: BayesianNetwork) -> None:
    """Raise ModelError unless the network is structurally usable."""
    if net.order is None:
        problems = validate_network(net)
        raise ModelError("network is not valid: " + "; ".join(problems[:3]))


def check_classifier(net: BayesianNetwork, clf: Classifier) -> None:
    """Raise ModelError unless the classifier is well formed over the network."""
    check_network(net)
    cvar = net.var(clf.class_var)
    if cvar.cardinality != 2:
        raise ModelError(
            f"class variable {clf.class_var!r} must be binary, "
            f"has {cvar.cardinality} values"
        )
    for f in clf.features:
        net.var(f)


def validate_network(net: BayesianNetwork) -> list[str]:
    """Check structural validity and return a list of violation messages.

    An empty list means the network is valid.  Checks: duplicate names,
    missing or duplicate CPTs, dangling references, wrong row counts, row
    arity, entries outside [0, 1], row sums != 1, cycles.
    """
    problems: list[str] = []
    names = [v.name for v in net.variables]
    seen: set[str] = set()
    for n in names:
        if n in seen:
            problems.append(f"duplicate variable name {n!r}")
        seen.add(n)

    cpt_children = [c.child for c in net.cpts]
    cseen: set[str] = set()
    for ch in cpt_children:
        if ch in cseen:
            problems.append(f"duplicate cpt for {ch!r}")
        cseen.add(ch)
    for n in names:
        if n not in cseen:
            problems.append(f"variable {n!r} has no cpt")

    for c in net.cpts:
        if c.child not in seen:
            problems.append(f"cpt references unknown child {c.child!r}")
            continue
        dangling = [p for p in c.parents if p not in seen]
        if dangling:
            for p in dangling:
                problems.append(f"cpt {c.child!r} references unknown parent {p!r}")
            continue
        card = net.var(c.child).cardinality
        expect_rows = 1
        for p in c.parents:
            expect_rows *= net.var(p).cardinality
        if len(c.rows) != expect_rows:
            problems.append(
                f"cpt {c.child!r}: expected {expect_rows} rows, found {len(c.rows)}"
            )
            continue
        for i, row in enumerate(c.rows):
            if len(row) != card:
                problems.append(
                    f"cpt {c.child!r} row {i}: expected {card} entries, found {len(row)}"
                )
                continue
            bad = [x for x in row if not (0.0 <= x <= 1.0) or not math.isfinite(x)]
            if bad:
                problems.append(
                    f"cpt {c.child!r} row {i}: entry {bad[0]!r} outside [0, 1]"
                )
                continue
            s = math.fsum(row)
            if abs(s - 1.0) > ROW_SUM_TOL:
                problems.append(f"cpt {c.child!r} row {i}: row sum {s:.10g} != 1")

    if not problems and net.order is None:
        cyc = _find_cycle(net)
        problems.append("cycle detected: " + " -> ".join(cyc))
    return problems


def _find_cycle(net: BayesianNetwork) -> list[str]:
    # Depth-first search over parent edges; returns some cycle for the
    # error message.  Only called when a cycle is known to exist.
    color: dict[str, int] = {}
    stack: list[str] = []

    def walk(n: str) -> list[str] | None:
        color[n] = 1
        stack.append(n)
        for ch in net._children.get(n, ()):
            c = color.get(ch, 0)
            if c == 1:
                return stack[stack.index(ch):] + [ch]
            if c == 0:
                found = walk(ch)
                if found:
                    return found
        stack.pop()
        color[n] = 2
        return None

    for v in net.variables:
        if color.get(v.name, 0) == 0:
            found = walk(v.name)
            if found:
                return found
    return ["<unknown>"]


def is_naive_bayes(net: BayesianNetwork, clf: Classifier) -> bool:
    """True when the classifier variables form a naive Bayes structure.

    The class variable must be a root, every feature's sole parent must be
    the class variable, and no feature may have a child among the
    classifier variables.
    """
    check_classifier(net, clf)
    if net.parents(clf.class_var):
        return False
    member = set(clf.features) | {clf.class_var}
    for f in clf.features:
        if net.parents(f) != (clf.class_var,):
            return False
        if any(ch in member for ch in net.children(f)):
            return False
    return True


def cond_independent_given_class(
    net: BayesianNetwork, clf: Classifier, subset: Iterable[str]
) -> bool:
    """True when the subset is independent of the remaining features given
    the class variable, by d-separation in the network DAG."""
    check_classifier(net, clf)
    sub = set(subset)
    extra = sub - set(clf.features)
    if extra:
        raise ModelError(f"subset names non-features: {sorted(extra)}")
    rest = set(clf.features) - sub
    if not sub or not rest:
        return True
    return _d_separated(net, sub, rest, {clf.class_var})


def _d_separated(
    net: BayesianNetwork, x: set[str], y: set[str], z: set[str]
) -> bool:
    # Moralized-ancestral-graph criterion: restrict to ancestors of
    # x | y | z, marry co-parents, drop directions, delete z, then test
    # whether any undirected path connects x and y.
    relevant = set(x) | set(y) | set(z)
    anc = set(relevant)
    frontier = list(relevant)
    while frontier:
        n = frontier.pop()
        for p in net.parents(n):
            if p not in anc:
                anc.add(p)
                frontier.append(p)

    adj: dict[str, set[str]] = {n: set() for n in anc}
    for n in anc:
        ps = [p for p in net.parents(n) if p in anc]
        for p in ps:
            adj[p].add(n)
            adj[n].add(p)
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                adj[ps[i]].add(ps[j])
                adj[ps[j]].add(ps[i])

    blocked = set(z)
    seen = set(x) - blocked
    frontier = list(seen)
    while frontier:
        n = frontier.pop()
        if n in y:
            return False
        for m in adj[n]:
            if m not in seen and m not in blocked:
                seen.add(m)
                frontier.append(m)
    return True
