"""Acceptance suite.

The first half pins exact rational golden values of the bundled
two-period example and the two supremum counterexamples.  The rest is
property-based: randomized instances checked against definitions and an
independent classical oracle.
"""

import json
import random
import time
from fractions import Fraction

import pytest

from robust_vdp import (
    AdaptedVector,
    Cone,
    NON_UNIQUE,
    NOT_EXISTS,
    UNIQUE,
    backward_value,
    check_bellman,
    cond_expect,
    extract_marginals,
    is_m_rectangular,
    parse_document,
    rectangularize,
    value_sets,
    vsup,
    vsup_adapted,
    vsup_general,
)
from robust_vdp.data import read_text
from robust_vdp.exactlp import dot, polyhedron_vertices, vadd
from robust_vdp.instance import _parse_cone

from .oracles import random_dynamics_problem, scalar_backward_induction

F = Fraction


@pytest.fixture(scope="module")
def full():
    """The bundled two-period example with the eight-model family."""
    return parse_document(read_text("binomial_tables.json")).problem


@pytest.fixture(scope="module")
def independent():
    """The four-model sub-family (independent one-step moves)."""
    return parse_document(read_text("binomial_tables_independent.json")).problem


def terminal(problem, name):
    tree = problem.tree
    return AdaptedVector(
        2, {leaf: problem.strategies[name][leaf] for leaf in tree.nodes_at(2)}
    )


# per model id: (E1 at u, E1 at d, E0 at root) for each strategy
TABLE_PHI = {
    "theta1": ((4, 4), (4, 4), (4, 4)),
    "theta2": ((6, 2), (2, 2), (4, 2)),
    "theta3": ((6, 2), (4, 4), (5, 3)),
    "theta4": ((4, 4), (2, 2), (3, 3)),
    "theta5": ((4, 4), (4, 4), (4, 4)),
    "theta6": ((4, 4), (2, 2), (F(5, 2), F(5, 2))),
    "theta7": ((6, 2), (4, 4), (F(9, 2), F(7, 2))),
    "theta8": ((6, 2), (2, 2), (3, 2)),
}
TABLE_PSI = {
    "theta1": ((0, 4), (6, 4), (F(9, 2), 4)),
    "theta2": ((0, 6), (6, 2), (3, 4)),
    "theta3": ((0, 6), (6, 4), (3, 5)),
    "theta4": ((0, 4), (6, 2), (3, 3)),
    "theta5": ((0, 4), (6, 4), (3, 4)),
    "theta6": ((0, 4), (6, 2), (F(9, 2), F(5, 2))),
    "theta7": ((0, 6), (6, 4), (F(9, 2), F(9, 2))),
    "theta8": ((0, 6), (6, 2), (F(9, 2), 3)),
}


def _check_table(problem, name, table):
    tree = problem.tree
    x = terminal(problem, name)
    for m in problem.family.models:
        want_u, want_d, want_0 = (tuple(F(c) for c in v) for v in table[m.id])
        e1 = cond_expect(tree, m, x, 1)
        assert e1.at("u") == want_u, (m.id, "u")
        assert e1.at("d") == want_d, (m.id, "d")
        e0 = cond_expect(tree, m, x, 0)
        assert e0.at("n0") == want_0, (m.id, "root")


def test_expectation_table_first_strategy(full):
    start = time.monotonic()
    _check_table(full, "phi", TABLE_PHI)
    assert time.monotonic() - start < 1.0


def test_expectation_table_second_strategy(full):
    _check_table(full, "psi", TABLE_PSI)


def test_worst_case_supremum_values(full, independent):
    for problem in (full, independent):
        tree, cone, family = problem.tree, problem.cone, problem.family
        sup1 = {}
        for name, want in (("phi", {"u": (6, 4), "d": (4, 4)}),
                           ("psi", {"u": (0, 6), "d": (6, 4)})):
            x = terminal(problem, name)
            res = vsup_adapted(cone, [cond_expect(tree, m, x, 1) for m in family.models])
            assert res.status == UNIQUE
            for node, v in want.items():
                assert res.value.at(node) == tuple(F(c) for c in v)
            sup1[name] = res.value
        # nested worst case at time 0
        for name, want in (("phi", (F(5), F(4))), ("psi", (F(9, 2), F(5)))):
            nested = vsup_adapted(
                cone, [cond_expect(tree, m, sup1[name], 0) for m in family.models]
            )
            assert nested.status == UNIQUE
            assert nested.value.at("n0") == want


def test_root_value_sets(full, independent):
    root = ("n0", "*")
    assert set(value_sets(full, 0)[root]) == {(F(5), F(4)), (F(9, 2), F(5))}
    assert set(value_sets(independent, 0)[root]) == {(F(4), F(4)), (F(9, 2), F(4))}
    for problem in (full, independent):
        assert set(backward_value(problem)[0][root]) == {
            (F(5), F(4)), (F(9, 2), F(5)),
        }


def test_bellman_verdicts(full, independent):
    rect = check_bellman(full)
    assert rect.weak_ok and rect.strong_ok and rect.equality_ok
    assert rect.m_rectangular is True
    sub = check_bellman(independent)
    assert sub.weak_ok
    assert not sub.strong_ok and not sub.equality_ok
    assert sub.m_rectangular is False


def test_rectangularity_of_bundled_families(full, independent):
    assert is_m_rectangular(full.family)
    assert not is_m_rectangular(independent.family)
    built = rectangularize(full.tree, extract_marginals(full.family))
    assert len(built.models) == 8
    assert {m.assignment(full.tree) for m in built.models} == {
        m.assignment(full.tree) for m in full.family.models
    }


def test_supremum_non_existence_certificate():
    start = time.monotonic()
    cone = _parse_cone(json.loads(read_text("cone_roof3d.json")), 3, "/")
    pts = [(F(0), F(0), F(0)), (F(1, 4), F(-1, 4), F(0))]
    res = vsup_general(cone, pts)
    assert res.status == NOT_EXISTS
    # the witness is a vertex of the upper-bound polyhedron that the
    # canonical minimal candidate fails to precede
    alpha = [max(dot(b, p) for p in pts) for b in cone.duals]
    assert res.undominated in polyhedron_vertices(cone.duals, alpha)
    assert all(cone.leq(p, res.undominated) for p in pts)
    assert not cone.leq(res.candidate, res.undominated)
    assert time.monotonic() - start < 5.0


def test_supremum_non_uniqueness_witnesses():
    w = (F(1), F(2))
    cone = Cone.halfspace(w)
    pts = [(F(0), F(0)), (F(1), F(1, 2)), (F(2), F(-1))]
    res = vsup(cone, pts)
    assert res.status == NON_UNIQUE
    m = max(dot(w, p) for p in pts)
    assert dot(w, res.value) == m
    assert dot(w, res.alternative) == m
    assert res.value != res.alternative


def test_bellman_relations_on_random_instances():
    start = time.monotonic()
    rng = random.Random(2024)
    n_total = 0
    n_rect = 0
    for i in range(200):
        problem = random_dynamics_problem(
            rng, dim=rng.randint(1, 3), rectangular=(i % 2 == 0)
        )
        report = check_bellman(problem)
        n_total += 1
        assert report.weak_ok, f"weak Bellman failed on instance {i}"
        if report.m_rectangular:
            n_rect += 1
            assert report.equality_ok, f"equality failed on rectangular instance {i}"
    assert n_total >= 200 and n_rect >= 50
    assert time.monotonic() - start < 60.0


def test_order_axioms_and_supremum_laws():
    rng = random.Random(77)
    cones = [
        Cone.componentwise(2),
        Cone.componentwise(3),
        Cone.halfspace((1, -2, 3)),
        Cone.from_duals([(1, 1, 0), (0, 1, 1), (1, 0, 1)]),
    ]

    def rv(d):
        return tuple(F(rng.randint(-8, 8), rng.choice((1, 2, 4))) for _ in range(d))

    full = parse_document(read_text("binomial_tables.json")).problem
    tree, family = full.tree, full.family

    def cone_element(cone, d):
        while True:
            c = rv(d)
            if cone.contains(c):
                return c
            neg = tuple(-v for v in c)
            if cone.contains(neg):
                return neg

    # order axioms: reflexivity, transitivity, vector compatibility
    for _ in range(1000):
        cone = rng.choice(cones)
        d = cone.dim
        x, z = rv(d), rv(d)
        y = vadd(x, cone_element(cone, d))
        w = vadd(y, cone_element(cone, d))
        assert cone.leq(x, x)
        assert cone.leq(x, y)
        assert cone.leq(y, w)
        assert cone.leq(x, w)
        assert cone.leq(vadd(x, z), vadd(y, z))
        lam = F(rng.randint(0, 4), rng.choice((1, 2)))
        assert cone.leq(tuple(lam * a for a in x), tuple(lam * a for a in y))

    # expectation is order preserving (random model, componentwise cone)
    cone2 = Cone.componentwise(2)
    for _ in range(1000):
        m = rng.choice(family.models)
        x = AdaptedVector(2, {n: rv(2) for n in tree.nodes_at(2)})
        bump = AdaptedVector(
            2, {n: tuple(abs(v) for v in rv(2)) for n in tree.nodes_at(2)}
        )
        y = AdaptedVector(2, {n: vadd(x.at(n), bump.at(n)) for n in tree.nodes_at(2)})
        t = rng.randint(0, 1)
        ex, ey = cond_expect(tree, m, x, t), cond_expect(tree, m, y, t)
        assert all(cone2.leq(ex.at(n), ey.at(n)) for n in tree.nodes_at(t))

    # supremum is monotone in its arguments
    for _ in range(1000):
        cone = rng.choice(cones)
        d = cone.dim
        xs = [rv(d) for _ in range(3)]
        ys = [vadd(x, tuple(abs(v) for v in rv(d))) for x in xs]
        if cone.kind != "componentwise":
            ys = [vadd(x, rv(d)) for x in xs]
            ys = [y if cone.leq(x, y) else x for x, y in zip(xs, ys)]
        rx, ry = vsup(cone, xs), vsup(cone, ys)
        assert cone.leq(rx.value, ry.value)

    # any two suprema dominate each other, and generate the same cones
    hs = Cone.halfspace((2, 1))
    for _ in range(1000):
        xs = [rv(2) for _ in range(3)]
        res = vsup(hs, xs)
        assert res.status == NON_UNIQUE
        v, w = res.value, res.alternative
        assert hs.leq(v, w) and hs.leq(w, v)
        z = rv(2)
        assert hs.leq(v, z) == hs.leq(w, z)  # same V + C membership
        assert hs.leq(z, v) == hs.leq(z, w)  # same V - C membership

    # under a partial order the supremum is unique
    for _ in range(1000):
        cone = rng.choice([cones[0], cones[1], cones[3]])
        res = vsup(cone, [rv(cone.dim) for _ in range(3)])
        assert res.status == UNIQUE

    # translation: sup of shifted points is the shifted sup
    for _ in range(1000):
        cone = rng.choice(cones)
        d = cone.dim
        xs = [rv(d) for _ in range(3)]
        b = rv(d)
        base, shifted = vsup(cone, xs), vsup(cone, [vadd(x, b) for x in xs])
        moved = vadd(base.value, b)
        assert cone.leq(moved, shifted.value) and cone.leq(shifted.value, moved)
        if base.status == UNIQUE:
            assert shifted.value == moved

    # tower property of conditional expectations
    for _ in range(1000):
        m = rng.choice(family.models)
        x = AdaptedVector(2, {n: rv(2) for n in tree.nodes_at(2)})
        nested = cond_expect(tree, m, cond_expect(tree, m, x, 1), 0)
        assert nested.values == cond_expect(tree, m, x, 0).values


def test_scalar_reduction_against_classical_oracle():
    rng = random.Random(4242)
    for i in range(50):
        problem = random_dynamics_problem(rng, dim=1, max_models=1)
        problem = type(problem)(
            tree=problem.tree,
            family=type(problem.family)(
                tree=problem.tree, models=problem.family.models[:1]
            ),
            cone=problem.cone,
            mode=problem.mode,
            dynamics=problem.dynamics,
        )
        v0 = value_sets(problem, 0)[(problem.tree.root, problem.initial_state)]
        assert min(v[0] for v in v0) == scalar_backward_induction(problem), i
