"""Independent reference implementations used to cross-check results.

Everything here is deliberately naive: definition-chasing checks and
brute-force enumeration, kept separate from the library's own algorithms.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from robust_vdp import (
    Cone,
    ControlledProblem,
    DynamicsSpec,
    Model,
    ModelFamily,
    ScenarioTree,
)
from robust_vdp.exactlp import dot, lp


def is_upper_bound(cone: Cone, points, v) -> bool:
    return all(cone.leq(p, v) for p in points)


def is_supremum(cone: Cone, points, v) -> bool:
    """Definition check: v is an upper bound of the points and precedes
    every other upper bound.

    The upper bounds form P = {y : <b_i, y> >= max_x <b_i, x>} and
    v + C = {y : <b_i, y> >= <b_i, v>}, so v precedes all of P exactly
    when each inequality's minimum over P is at least its value at v.
    """
    if cone.duals is None:
        raise ValueError("oracle needs a dual representation")
    if not is_upper_bound(cone, points, v):
        return False
    b_rows = list(cone.duals)
    alpha = [max(dot(b, p) for p in points) for b in b_rows]
    for b in b_rows:
        res = lp(list(b), a_ge=b_rows, b_ge=alpha)
        assert res.status == "optimal"
        if res.value < dot(b, v):
            return False
    return True


def scalar_backward_induction(problem: ControlledProblem) -> Fraction:
    """Classical expected-loss minimization for d = 1 and a single model."""
    assert len(problem.family.models) == 1
    model = problem.family.models[0]
    tree = problem.tree

    def w(t, node, state) -> Fraction:
        if t == tree.horizon:
            loss = problem.terminal_loss_at(node, state)
            assert len(loss) == 1
            return loss[0]
        best = None
        for a in problem.controls_at(t, state):
            total = Fraction(0)
            for p, c in zip(model.transition[node], tree.children[node]):
                total += p * w(t + 1, c, problem.next_state(t, state, a, c))
            if best is None or total < best:
                best = total
        return best

    return w(0, tree.root, problem.initial_state)


# ---------------------------------------------------------------------------
# random instance generation


def _random_prob_vector(rng: random.Random, n: int) -> tuple[Fraction, ...]:
    weights = [Fraction(rng.randint(1, 4)) for _ in range(n)]
    s = sum(weights)
    return tuple(w / s for w in weights)


def random_tree(
    rng: random.Random,
    max_depth: int = 3,
    max_children: int = 3,
    max_leaves: int = 8,
) -> ScenarioTree:
    """Random tree within the stated bounds, kept small enough for exact
    full enumeration (leaf count capped)."""
    while True:
        horizon = rng.randint(1, max_depth)
        levels = [("n0",)]
        children: dict[str, tuple[str, ...]] = {}
        counter = 0
        for t in range(horizon):
            nxt = []
            for n in levels[t]:
                kids = []
                for _ in range(rng.randint(1, max_children)):
                    counter += 1
                    kids.append(f"n{counter}")
                children[n] = tuple(kids)
                nxt.extend(kids)
            levels.append(tuple(nxt))
        if len(levels[-1]) <= max_leaves:
            return ScenarioTree(
                horizon=horizon, levels=tuple(levels), children=children
            )


def random_family(
    rng: random.Random, tree: ScenarioTree, max_models: int = 4, rectangular: bool = False
) -> ModelFamily:
    nonterminal = [n for t in range(tree.horizon) for n in tree.nodes_at(t)]
    if rectangular:
        from robust_vdp import rectangularize

        # two candidates on at most two nodes keeps the product family
        # within the max_models bound
        wide = rng.sample(nonterminal, min(len(nonterminal), rng.randint(0, 2)))
        marginals = {
            n: [
                _random_prob_vector(rng, len(tree.children[n]))
                for _ in range(2 if n in wide else 1)
            ]
            for n in nonterminal
        }
        return rectangularize(tree, marginals)
    models = []
    for k in range(rng.randint(1, max_models)):
        transition = {
            n: _random_prob_vector(rng, len(tree.children[n])) for n in nonterminal
        }
        models.append(Model(id=f"m{k}", transition=transition))
    return ModelFamily(tree=tree, models=tuple(models))


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-8, 8), rng.choice((1, 2, 4)))


def random_dynamics_problem(
    rng: random.Random,
    dim: int = 2,
    max_controls: int = 2,
    max_models: int = 4,
    rectangular: bool = False,
    n_states: int = 2,
) -> ControlledProblem:
    """Random componentwise-order problem in dynamics mode.

    State transitions are random over a small state alphabet; every state
    admits every control at every time, so all strategies are valid.
    """
    tree = random_tree(rng)
    family = random_family(rng, tree, max_models=max_models, rectangular=rectangular)
    states = [f"s{i}" for i in range(n_states)]
    controls = [f"a{i}" for i in range(rng.randint(1, max_controls))]
    admissible = {
        (t, s): tuple(controls) for t in range(tree.horizon) for s in states
    }
    labels = sorted({tree.label(c) for n in tree.children for c in tree.children[n]})
    transition = {
        (t, s, a, lab): rng.choice(states)
        for t in range(tree.horizon)
        for s in states
        for a in controls
        for lab in labels
    }
    loss = {
        s: tuple(random_rational(rng) for _ in range(dim)) for s in states
    }
    dyn = DynamicsSpec(
        initial_state=states[0],
        admissible=admissible,
        transition=transition,
        loss=loss,
    )
    return ControlledProblem(
        tree=tree,
        family=family,
        cone=Cone.componentwise(dim),
        mode="dynamics",
        dynamics=dyn,
    )
