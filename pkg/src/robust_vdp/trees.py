"""Finite scenario trees, model families and adapted random vectors.

A scenario tree is a rooted tree whose depth-t nodes carry the atoms of
the time-t information set; an adapted vector assigns one d-vector to each
node of a fixed level.  A model is an assignment of exact transition
probabilities to every non-terminal node; a family of such models captures
the ambiguity about the true law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .cones import Cone, DimensionMismatchError
from .exactlp import ZERO, Vec, vec
from .suprema import NON_UNIQUE, NOT_EXISTS, UNIQUE, SupResult, vsup


@dataclass(frozen=True)
class ScenarioTree:
    horizon: int
    levels: tuple[tuple[str, ...], ...]  # node ids per time 0..T
    children: Mapping[str, tuple[str, ...]]
    labels: Mapping[str, str] = field(default_factory=dict)  # child -> branch label

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if len(self.levels) != self.horizon + 1:
            raise ValueError("levels must list nodes for each time 0..T")
        if len(self.levels[0]) != 1:
            raise ValueError("exactly one root node is required")
        seen = set()
        for level in self.levels:
            for n in level:
                if n in seen:
                    raise ValueError(f"duplicate node id {n!r}")
                seen.add(n)
        claimed = set()
        for t in range(self.horizon):
            next_level = set(self.levels[t + 1])
            for n in self.levels[t]:
                kids = self.children.get(n, ())
                if not kids:
                    raise ValueError(f"non-terminal node {n!r} has no children")
                for c in kids:
                    if c not in next_level:
                        raise ValueError(
                            f"child {c!r} of {n!r} is not a time-{t + 1} node"
                        )
                    if c in claimed:
                        raise ValueError(f"node {c!r} has two parents")
                    claimed.add(c)
        if claimed != seen - set(self.levels[0]):
            raise ValueError("every non-root node needs exactly one parent")

    @property
    def root(self) -> str:
        return self.levels[0][0]

    def nodes_at(self, t: int) -> tuple[str, ...]:
        return self.levels[t]

    def time_of(self, node: str) -> int:
        for t, level in enumerate(self.levels):
            if node in level:
                return t
        raise KeyError(node)

    def label(self, child: str) -> str:
        return self.labels.get(child, child)

    def leaves_below(self, node: str) -> list[str]:
        t = self.time_of(node)
        frontier = [node]
        for _ in range(t, self.horizon):
            frontier = [c for n in frontier for c in self.children[n]]
        return frontier


@dataclass(frozen=True)
class Model:
    id: str
    #: per non-terminal node, exact probabilities aligned with the
    #: node's children order
    transition: Mapping[str, tuple[Fraction, ...]]

    def validate(self, tree: ScenarioTree):
        for t in range(tree.horizon):
            for n in tree.nodes_at(t):
                p = self.transition.get(n)
                if p is None:
                    raise ValueError(f"model {self.id}: no transition at {n!r}")
                if len(p) != len(tree.children[n]):
                    raise ValueError(
                        f"model {self.id}: transition at {n!r} has wrong arity"
                    )
                if any(x < 0 for x in p):
                    raise ValueError(
                        f"model {self.id}: negative probability at {n!r}"
                    )
                if sum(p) != 1:
                    raise ValueError(
                        f"model {self.id}: probabilities at {n!r} sum to "
                        f"{sum(p)} != 1"
                    )

    def assignment(self, tree: ScenarioTree) -> tuple:
        """Hashable transition assignment in canonical node order."""
        return tuple(
            self.transition[n]
            for t in range(tree.horizon)
            for n in tree.nodes_at(t)
        )


@dataclass(frozen=True)
class ModelFamily:
    tree: ScenarioTree
    models: tuple[Model, ...]

    def __post_init__(self):
        if not self.models:
            raise ValueError("a model family must be nonempty")
        ids = [m.id for m in self.models]
        if len(set(ids)) != len(ids):
            raise ValueError("model ids must be unique")
        for m in self.models:
            m.validate(self.tree)

    def by_id(self, model_id: str) -> Model:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(model_id)


@dataclass(frozen=True)
class AdaptedVector:
    time: int
    values: Mapping[str, Vec]

    @staticmethod
    def of(time: int, values: Mapping[str, Iterable]) -> "AdaptedVector":
        return AdaptedVector(time, {n: vec(v) for n, v in values.items()})

    @property
    def dim(self) -> int:
        return len(next(iter(self.values.values())))

    def at(self, node: str) -> Vec:
        return self.values[node]

    def check_level(self, tree: ScenarioTree):
        nodes = set(tree.nodes_at(self.time))
        if set(self.values) != nodes:
            raise ValueError(
                f"adapted vector does not cover exactly the time-{self.time} nodes"
            )
        d = self.dim
        if any(len(v) != d for v in self.values.values()):
            raise DimensionMismatchError("mixed dimensions in adapted vector")


def cond_expect(
    tree: ScenarioTree, model: Model, x: AdaptedVector, t: int
) -> AdaptedVector:
    """Conditional expectation of x given the time-t information, under
    the model's transition probabilities.  Exact."""
    s = x.time
    if not 0 <= t <= s <= tree.horizon:
        raise ValueError(f"need 0 <= t <= {s} <= horizon, got t={t}")
    x.check_level(tree)
    d = x.dim
    vals = dict(x.values)
    for level in range(s - 1, t - 1, -1):
        nxt = {}
        for n in tree.nodes_at(level):
            probs = model.transition[n]
            acc = [ZERO] * d
            for p, c in zip(probs, tree.children[n]):
                child_val = vals[c]
                for i in range(d):
                    acc[i] += p * child_val[i]
            nxt[n] = tuple(acc)
        vals = nxt
    return AdaptedVector(t, vals)


def leq_t(cone: Cone, x: AdaptedVector, y: AdaptedVector) -> bool:
    """Node-wise cone order on adapted vectors of the same time."""
    if x.time != y.time:
        raise ValueError("adapted vectors live at different times")
    if set(x.values) != set(y.values):
        raise ValueError("adapted vectors cover different nodes")
    return all(cone.leq(x.at(n), y.at(n)) for n in x.values)


@dataclass(frozen=True)
class AdaptedSupResult:
    status: str
    value: Optional[AdaptedVector] = None
    alternative: Optional[AdaptedVector] = None
    #: node -> SupResult for nodes where the supremum does not exist
    failures: Mapping[str, SupResult] = field(default_factory=dict)

    @property
    def exists(self) -> bool:
        return self.status != NOT_EXISTS


def vsup_adapted(cone: Cone, xs: Iterable[AdaptedVector]) -> AdaptedSupResult:
    """Node-wise supremum of finitely many adapted vectors.

    The lifted order compares node by node, so the supremum factorises
    over the atoms of the level.
    """
    items = list(xs)
    if not items:
        raise ValueError("supremum of an empty collection is undefined")
    t = items[0].time
    if any(x.time != t for x in items):
        raise ValueError("adapted vectors live at different times")
    nodes = sorted(items[0].values)
    per_node = {n: vsup(cone, [x.at(n) for x in items]) for n in nodes}
    failures = {n: r for n, r in per_node.items() if r.status == NOT_EXISTS}
    if failures:
        return AdaptedSupResult(NOT_EXISTS, failures=failures)
    value = AdaptedVector(t, {n: per_node[n].value for n in nodes})
    if any(r.status == NON_UNIQUE for r in per_node.values()):
        alt = AdaptedVector(
            t,
            {
                n: (
                    per_node[n].alternative
                    if per_node[n].status == NON_UNIQUE
                    else per_node[n].value
                )
                for n in nodes
            },
        )
        return AdaptedSupResult(NON_UNIQUE, value=value, alternative=alt)
    return AdaptedSupResult(UNIQUE, value=value)


def constant_adapted(tree: ScenarioTree, t: int, v: Iterable) -> AdaptedVector:
    vv = vec(v)
    return AdaptedVector(t, {n: vv for n in tree.nodes_at(t)})
