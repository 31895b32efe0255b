"""Set-valued dynamic programming on controlled scenario trees.

Three set-valued value functions are computed for a robust multi-loss
control problem: the forward value set (one worst-case expected loss per
admissible strategy), the one-step recursion fed with the exact forward
sets, and the genuinely backward recursion.  The engine verifies the weak
inclusions that always relate them and the strong inclusions / equalities
expected when the model family is rectangular and the cone order is a
partial order.

Internally every quantity is indexed by ``(time, node, state)``: the value
sets factorise over the atoms of a time level, so per-node sets are a
faithful representation of the corresponding sets of adapted vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .cones import COMPONENTWISE, Cone, minimal_elements
from .errors import (
    DeskScaleExceededError,
    SupNotExistsError,
    UnsupportedConeError,
)
from .exactlp import ZERO, Vec, vec
from .rectangularity import is_m_rectangular
from .suprema import NOT_EXISTS, vsup
from .trees import AdaptedVector, ModelFamily, ScenarioTree

DEFAULT_BUDGET = 10**6

DYNAMICS = "dynamics"
TABULATED = "tabulated"

#: synthetic state occupied before a tabulated strategy is chosen
TAB_ROOT_STATE = "*"

#: value sets of one time level: (node, state) -> vectors
LevelSets = dict[tuple[str, str], tuple[Vec, ...]]


@dataclass(frozen=True)
class DynamicsSpec:
    initial_state: str
    #: (time, state) -> admissible one-step controls
    admissible: Mapping[tuple[int, str], tuple[str, ...]]
    #: (time, state, control, branch label) -> next state
    transition: Mapping[tuple[int, str, str, str], str]
    #: terminal state -> loss vector
    loss: Mapping[str, Vec]


@dataclass(frozen=True)
class ControlledProblem:
    tree: ScenarioTree
    family: ModelFamily
    cone: Cone
    mode: str
    dynamics: Optional[DynamicsSpec] = None
    #: tabulated mode: strategy name -> leaf -> terminal loss
    strategies: Optional[Mapping[str, Mapping[str, Vec]]] = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.mode == DYNAMICS:
            if self.dynamics is None:
                raise ValueError("dynamics mode needs a DynamicsSpec")
        elif self.mode == TABULATED:
            if not self.strategies:
                raise ValueError("tabulated mode needs at least one strategy")
            leaves = set(self.tree.nodes_at(self.tree.horizon))
            for name, table in self.strategies.items():
                if set(table) != leaves:
                    raise ValueError(
                        f"strategy {name!r} must define a loss on every leaf"
                    )
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    # -- a uniform (state, control) view over both modes ---------------------

    @property
    def initial_state(self) -> str:
        if self.mode == DYNAMICS:
            return self.dynamics.initial_state
        return TAB_ROOT_STATE

    def controls_at(self, t: int, state: str) -> tuple[str, ...]:
        if self.mode == DYNAMICS:
            ctrls = self.dynamics.admissible.get((t, state))
            if not ctrls:
                raise ValueError(f"no admissible control at (t={t}, {state!r})")
            return ctrls
        if t == 0:
            return tuple(sorted(self.strategies))
        return (state,)  # committed to one named strategy

    def next_state(self, t: int, state: str, control: str, child: str) -> str:
        if self.mode == DYNAMICS:
            label = self.tree.label(child)
            key = (t, state, control, label)
            if key not in self.dynamics.transition:
                raise ValueError(f"dynamics transition missing for {key}")
            return self.dynamics.transition[key]
        return control if t == 0 else state

    def terminal_loss_at(self, leaf: str, state: str) -> Vec:
        if self.mode == DYNAMICS:
            if state not in self.dynamics.loss:
                raise ValueError(f"no loss for terminal state {state!r}")
            return self.dynamics.loss[state]
        return self.strategies[state][leaf]


@dataclass(frozen=True)
class Strategy:
    start: tuple[int, str, str]  # (time, node, state)
    choice: Mapping[tuple[str, str], str]  # (node, state) -> control

    def control(self, node: str, state: str) -> str:
        return self.choice[(node, state)]

    def describe(self) -> str:
        t, node, state = self.start
        return self.choice[(node, state)]


@dataclass(frozen=True)
class ValueSet:
    time: int
    elements: tuple[AdaptedVector, ...]
    provenance: tuple[str, ...]


# ---------------------------------------------------------------------------
# strategy enumeration


def _count_strategies(problem: ControlledProblem, t: int, node: str, state: str) -> int:
    @lru_cache(maxsize=None)
    def count(tt, nn, ss):
        if tt == problem.tree.horizon:
            return 1
        total = 0
        for a in problem.controls_at(tt, ss):
            prod = 1
            for c in problem.tree.children[nn]:
                prod *= count(tt + 1, c, problem.next_state(tt, ss, a, c))
                if prod > problem.budget:
                    return problem.budget + 1
            total += prod
            if total > problem.budget:
                return problem.budget + 1
        return total
    return count(t, node, state)


def enumerate_strategies(
    problem: ControlledProblem,
    t: int = 0,
    node: Optional[str] = None,
    state: Optional[str] = None,
) -> list[Strategy]:
    """All adapted strategies from (t, node, state) to the horizon, in a
    deterministic depth-first order."""
    node = node if node is not None else problem.tree.root
    state = state if state is not None else problem.initial_state
    if _count_strategies(problem, t, node, state) > problem.budget:
        raise DeskScaleExceededError(
            f"strategy enumeration exceeds the budget of {problem.budget}"
        )

    def recurse(tt, nn, ss) -> list[dict]:
        if tt == problem.tree.horizon:
            return [{}]
        out = []
        for a in problem.controls_at(tt, ss):
            per_child = [
                recurse(tt + 1, c, problem.next_state(tt, ss, a, c))
                for c in problem.tree.children[nn]
            ]
            for combo in product(*per_child):
                d = {(nn, ss): a}
                for sub in combo:
                    d.update(sub)
                out.append(d)
        return out

    return [Strategy(start=(t, node, state), choice=d) for d in recurse(t, node, state)]


def _terminal_table(
    problem: ControlledProblem, strategy: Strategy
) -> dict[str, Vec]:
    """Leaf -> loss vector reached under the strategy, from its start."""
    t0, node0, state0 = strategy.start

    def recurse(tt, nn, ss, acc):
        if tt == problem.tree.horizon:
            acc[nn] = problem.terminal_loss_at(nn, ss)
            return
        a = strategy.control(nn, ss)
        for c in problem.tree.children[nn]:
            recurse(tt + 1, c, problem.next_state(tt, ss, a, c), acc)

    acc: dict[str, Vec] = {}
    recurse(t0, node0, state0, acc)
    return acc


def terminal_loss(problem: ControlledProblem, strategy: Strategy) -> AdaptedVector:
    """Terminal loss of a root strategy as an adapted vector at the horizon."""
    table = _terminal_table(problem, strategy)
    return AdaptedVector(problem.tree.horizon, table)


# ---------------------------------------------------------------------------
# expectations


def _expect_below(
    tree: ScenarioTree, model, node: str, t: int, leaf_values: Mapping[str, Vec]
) -> Vec:
    """Expectation of terminal values over the subtree below (t, node)."""
    if t == tree.horizon:
        return leaf_values[node]
    probs = model.transition[node]
    kids = tree.children[node]
    d = len(next(iter(leaf_values.values())))
    acc = [ZERO] * d
    for p, c in zip(probs, kids):
        sub = _expect_below(tree, model, c, t + 1, leaf_values)
        for i in range(d):
            acc[i] += p * sub[i]
    return tuple(acc)


def _sup_or_raise(problem: ControlledProblem, points, context: str) -> Vec:
    res = vsup(problem.cone, points)
    if res.status == NOT_EXISTS:
        raise SupNotExistsError(f"supremum does not exist at {context}")
    return res.value


# ---------------------------------------------------------------------------
# reachability


def reachable_states(problem: ControlledProblem) -> dict[int, list[tuple[str, str]]]:
    """Per time, the reachable (node, state) pairs in deterministic order."""
    tree = problem.tree
    out: dict[int, list[tuple[str, str]]] = {
        0: [(tree.root, problem.initial_state)]
    }
    for t in range(tree.horizon):
        nxt: list[tuple[str, str]] = []
        for node, state in out[t]:
            for a in problem.controls_at(t, state):
                for c in tree.children[node]:
                    pair = (c, problem.next_state(t, state, a, c))
                    if pair not in nxt:
                        nxt.append(pair)
        out[t + 1] = nxt
    return out


# ---------------------------------------------------------------------------
# the three value functions


def _dedup(vals: Iterable[Vec]) -> tuple[Vec, ...]:
    out: list[Vec] = []
    for v in vals:
        if v not in out:
            out.append(v)
    return tuple(out)


def value_sets(problem: ControlledProblem, t: int) -> LevelSets:
    """Forward value sets at time t, per reachable (node, state): one
    worst-case expected loss per strategy from that point."""
    tree = problem.tree
    reach = reachable_states(problem)
    out: LevelSets = {}
    for node, state in reach[t]:
        vals = []
        for strat in enumerate_strategies(problem, t, node, state):
            table = _terminal_table(problem, strat)
            exps = [
                _expect_below(tree, m, node, t, table) for m in problem.family.models
            ]
            vals.append(
                _sup_or_raise(problem, exps, f"t={t}, node={node!r}, strategy")
            )
        out[(node, state)] = _dedup(vals)
    return out


def value_function(problem: ControlledProblem, t: int = 0) -> ValueSet:
    """Forward value set at time t as adapted vectors, one per root
    strategy (deduplicated)."""
    tree = problem.tree
    elements: list[AdaptedVector] = []
    provenance: list[str] = []
    if t == tree.horizon:
        for strat in enumerate_strategies(problem):
            av = terminal_loss(problem, strat)
            if all(av.values != e.values for e in elements):
                elements.append(av)
                provenance.append(strat.describe())
        return ValueSet(t, tuple(elements), tuple(provenance))
    for strat in enumerate_strategies(problem):
        table = _terminal_table(problem, strat)
        # state threading: walk the strategy to find the state at each node
        states: dict[str, str] = {tree.root: problem.initial_state}
        for tt in range(t):
            for node in tree.nodes_at(tt):
                if node not in states:
                    continue
                a = strat.control(node, states[node])
                for c in tree.children[node]:
                    states[c] = problem.next_state(tt, states[node], a, c)
        vals = {}
        for node in tree.nodes_at(t):
            exps = [
                _expect_below(problem.tree, m, node, t, table)
                for m in problem.family.models
            ]
            vals[node] = _sup_or_raise(
                problem, exps, f"t={t}, node={node!r}, strategy"
            )
        av = AdaptedVector(t, vals)
        if all(av.values != e.values for e in elements):
            elements.append(av)
            provenance.append(strat.describe())
    return ValueSet(t, tuple(elements), tuple(provenance))


def prune_pareto(points: Iterable[Vec], cone: Cone) -> tuple[Vec, ...]:
    """Drop every point dominated by another point of the set.  Needs a
    pointed cone; preserves the weak set inclusions but not raw equality."""
    return tuple(minimal_elements(points, cone))


def _one_step_sets(
    problem: ControlledProblem,
    t: int,
    next_sets: Mapping[tuple[str, str], Sequence[Vec]],
    pairs: Sequence[tuple[str, str]],
    prune: bool = False,
) -> LevelSets:
    """Selector recursion: per (node, state), the suprema over models of
    one-step expectations of every per-child selection from next_sets."""
    tree = problem.tree
    out: LevelSets = {}
    for node, state in pairs:
        kids = tree.children[node]
        vals: list[Vec] = []
        total = 0
        for a in problem.controls_at(t, state):
            child_sets = []
            size = 1
            for c in kids:
                s = next_sets[(c, problem.next_state(t, state, a, c))]
                child_sets.append(s)
                size *= len(s)
            total += size
            if total > problem.budget:
                raise DeskScaleExceededError(
                    f"selector product at t={t}, node={node!r} exceeds the "
                    f"budget of {problem.budget}"
                )
            for combo in product(*child_sets):
                exps = []
                for m in problem.family.models:
                    probs = m.transition[node]
                    d = len(combo[0])
                    acc = [ZERO] * d
                    for p, x in zip(probs, combo):
                        for i in range(d):
                            acc[i] += p * x[i]
                    exps.append(tuple(acc))
                vals.append(
                    _sup_or_raise(problem, exps, f"t={t}, node={node!r}, selector")
                )
        sets = _dedup(vals)
        if prune:
            sets = prune_pareto(sets, problem.cone)
        out[(node, state)] = sets
    return out


def backward_value(
    problem: ControlledProblem, prune: bool = False
) -> dict[int, LevelSets]:
    """Backward recursion from the horizon down to time 0."""
    tree = problem.tree
    reach = reachable_states(problem)
    out: dict[int, LevelSets] = {}
    out[tree.horizon] = {
        (leaf, state): (problem.terminal_loss_at(leaf, state),)
        for leaf, state in reach[tree.horizon]
    }
    for t in range(tree.horizon - 1, -1, -1):
        out[t] = _one_step_sets(problem, t, out[t + 1], reach[t], prune=prune)
    return out


def one_step_R(
    problem: ControlledProblem, t: int, v_next: LevelSets
) -> LevelSets:
    """One-step recursion fed with the exact forward value sets at t+1."""
    reach = reachable_states(problem)
    return _one_step_sets(problem, t, v_next, reach[t])


# ---------------------------------------------------------------------------
# Bellman report


@dataclass(frozen=True)
class BellmanRow:
    time: int
    #: weak inclusions (hold on every instance)
    b_in_v_plus: bool   # B subset of V + C
    v_in_b_minus: bool  # V subset of B - C
    r_in_v_plus: bool
    v_in_r_minus: bool
    #: strong inclusions (expected under rectangularity)
    v_in_b_plus: bool
    b_in_v_minus: bool
    v_in_r_plus: bool
    r_in_v_minus: bool
    #: exact set equality V = R = B (expected under rectangularity and a
    #: pointed cone)
    equality: bool
    witnesses: tuple[str, ...] = ()

    @property
    def weak_ok(self) -> bool:
        return (
            self.b_in_v_plus
            and self.v_in_b_minus
            and self.r_in_v_plus
            and self.v_in_r_minus
        )

    @property
    def strong_ok(self) -> bool:
        return (
            self.v_in_b_plus
            and self.b_in_v_minus
            and self.v_in_r_plus
            and self.r_in_v_minus
        )


@dataclass(frozen=True)
class BellmanReport:
    rows: tuple[BellmanRow, ...]
    m_rectangular: Optional[bool]  # None when not decidable (non-componentwise)
    pointed: bool

    @property
    def weak_ok(self) -> bool:
        return all(r.weak_ok for r in self.rows)

    @property
    def strong_ok(self) -> bool:
        return all(r.strong_ok for r in self.rows)

    @property
    def equality_ok(self) -> bool:
        return all(r.equality for r in self.rows)


def check_bellman(problem: ControlledProblem) -> BellmanReport:
    """Evaluate all Bellman inclusions and the set equality per time."""
    tree = problem.tree
    cone = problem.cone
    b_all = backward_value(problem)
    v_all = {t: value_sets(problem, t) for t in range(tree.horizon + 1)}
    rows = []
    for t in range(tree.horizon):
        r_lvl = one_step_R(problem, t, v_all[t + 1])
        v_lvl = v_all[t]
        b_lvl = b_all[t]
        keys = list(v_lvl)
        flags = dict(
            b_in_v_plus=True, v_in_b_minus=True, r_in_v_plus=True,
            v_in_r_minus=True, v_in_b_plus=True, b_in_v_minus=True,
            v_in_r_plus=True, r_in_v_minus=True, equality=True,
        )
        witnesses: list[str] = []

        def record(name, ok, key):
            if not ok:
                flags[name] = False
                witnesses.append(f"{name} fails at t={t}, (node, state)={key}")

        for key in keys:
            v, b, r = v_lvl[key], b_lvl[key], r_lvl[key]
            record("b_in_v_plus", cone.set_precurly(v, b), key)
            record("v_in_b_minus", cone.set_curlyprec(v, b), key)
            record("r_in_v_plus", cone.set_precurly(v, r), key)
            record("v_in_r_minus", cone.set_curlyprec(v, r), key)
            record("v_in_b_plus", cone.set_precurly(b, v), key)
            record("b_in_v_minus", cone.set_curlyprec(b, v), key)
            record("v_in_r_plus", cone.set_precurly(r, v), key)
            record("r_in_v_minus", cone.set_curlyprec(r, v), key)
            record(
                "equality", set(v) == set(b) == set(r), key
            )
        rows.append(BellmanRow(time=t, witnesses=tuple(witnesses), **flags))
    rect = (
        is_m_rectangular(problem.family)
        if problem.cone.kind == COMPONENTWISE
        else None
    )
    return BellmanReport(
        rows=tuple(rows), m_rectangular=rect, pointed=cone.is_pointed()
    )


# ---------------------------------------------------------------------------
# upper images (component-wise order only)


def _require_componentwise(problem: ControlledProblem):
    if problem.cone.kind != COMPONENTWISE:
        raise UnsupportedConeError(
            "upper images are defined for the component-wise order only"
        )


def upper_image(problem: ControlledProblem, t: int) -> LevelSets:
    """Pareto generators of the time-t upper image, per (node, state)."""
    _require_componentwise(problem)
    if t == problem.tree.horizon:
        reach = reachable_states(problem)
        return {
            (leaf, state): (problem.terminal_loss_at(leaf, state),)
            for leaf, state in reach[t]
        }
    v_lvl = value_sets(problem, t)
    return {
        key: tuple(minimal_elements(vals, problem.cone))
        for key, vals in v_lvl.items()
    }


@dataclass(frozen=True)
class UpperImageRow:
    time: int
    inclusion_ok: bool
    generator_equality: Optional[bool]  # None when not asserted
    n_checked: int
    witnesses: tuple[str, ...] = ()


@dataclass(frozen=True)
class UpperImageReport:
    rows: tuple[UpperImageRow, ...]
    m_rectangular: bool

    @property
    def inclusion_ok(self) -> bool:
        return all(r.inclusion_ok for r in self.rows)

    @property
    def generator_equality_ok(self) -> bool:
        return all(r.generator_equality is not False for r in self.rows)


def _cone_perturbations(d: int) -> list[Vec]:
    half = vec(["1/2"] * d)
    out = [tuple([ZERO] * d), half]
    for i in range(d):
        e = [ZERO] * d
        e[i] = half[0]
        out.append(tuple(e))
    return out


def check_upper_image_recursion(problem: ControlledProblem) -> UpperImageReport:
    """One-step recursion on upper images: feeding generators (plus a
    fixed set of cone perturbations) of the time-(t+1) upper image into
    the one-step worst case must land inside the time-t upper image; under
    marginal rectangularity the generators coincide."""
    _require_componentwise(problem)
    tree = problem.tree
    reach = reachable_states(problem)
    rect = is_m_rectangular(problem.family)
    gens = {t: upper_image(problem, t) for t in range(tree.horizon + 1)}
    rows = []
    for t in range(tree.horizon):
        dim = len(next(iter(gens[t + 1].values()))[0])
        perturbed: LevelSets = {
            key: _dedup(
                tuple(
                    tuple(x + p for x, p in zip(g, pert))
                    for g in vals
                    for pert in _cone_perturbations(dim)
                )
            )
            for key, vals in gens[t + 1].items()
        }
        rec_perturbed = _one_step_sets(problem, t, perturbed, reach[t])
        rec_pure = _one_step_sets(problem, t, gens[t + 1], reach[t])
        ok = True
        eq: Optional[bool] = True if rect else None
        witnesses = []
        n_checked = 0
        for key in reach[t]:
            target = gens[t][key]
            for x in rec_perturbed[key]:
                n_checked += 1
                if not any(problem.cone.leq(g, x) for g in target):
                    ok = False
                    witnesses.append(
                        f"recursion value {x} escapes the upper image at "
                        f"t={t}, (node, state)={key}"
                    )
            if rect:
                mins = set(minimal_elements(rec_pure[key], problem.cone))
                if mins != set(target):
                    eq = False
                    witnesses.append(
                        f"generator mismatch at t={t}, (node, state)={key}"
                    )
        rows.append(
            UpperImageRow(
                time=t,
                inclusion_ok=ok,
                generator_equality=eq,
                n_checked=n_checked,
                witnesses=tuple(witnesses),
            )
        )
    return UpperImageReport(rows=tuple(rows), m_rectangular=rect)
