"""Rectangular model families: construction and verification.

A family is marginal-rectangular when it is the full Cartesian product of
per-node sets of transition vectors; that structural closure is exactly
what makes nested worst-case expectations collapse to the direct worst
case under the component-wise order.  For a general cone order only an
empirical check on supplied or sampled terminal vectors is possible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .cones import Cone
from .exactlp import Vec
from .suprema import NOT_EXISTS
from .trees import (
    AdaptedVector,
    Model,
    ModelFamily,
    ScenarioTree,
    cond_expect,
    leq_t,
    vsup_adapted,
)

#: per non-terminal node, the candidate transition vectors
MarginalSets = Mapping[str, Sequence[tuple[Fraction, ...]]]


def _nonterminal_nodes(tree: ScenarioTree) -> list[str]:
    return [n for t in range(tree.horizon) for n in tree.nodes_at(t)]


def rectangularize(tree: ScenarioTree, marginals: MarginalSets) -> ModelFamily:
    """All models obtained by independently picking one candidate
    transition vector per non-terminal node."""
    nodes = _nonterminal_nodes(tree)
    for n in nodes:
        if not marginals.get(n):
            raise ValueError(f"no transition candidates at node {n!r}")
    combos = product(*(range(len(marginals[n])) for n in nodes))
    models = []
    for k, choice in enumerate(combos):
        transition = {n: tuple(marginals[n][i]) for n, i in zip(nodes, choice)}
        models.append(Model(id=f"theta{k + 1}", transition=transition))
    return ModelFamily(tree=tree, models=tuple(models))


def extract_marginals(family: ModelFamily) -> dict[str, list[tuple[Fraction, ...]]]:
    """Per node, the distinct transition vectors used across the family."""
    out: dict[str, list[tuple[Fraction, ...]]] = {}
    for n in _nonterminal_nodes(family.tree):
        seen: list[tuple[Fraction, ...]] = []
        for m in family.models:
            p = tuple(m.transition[n])
            if p not in seen:
                seen.append(p)
        out[n] = seen
    return out


def is_m_rectangular(family: ModelFamily) -> bool:
    """Structural test: the family equals the full product of its own
    node-wise marginal sets."""
    marginals = extract_marginals(family)
    assignments = {m.assignment(family.tree) for m in family.models}
    expected = 1
    for n in _nonterminal_nodes(family.tree):
        expected *= len(marginals[n])
    # every model draws its rows from the extracted marginals, so the
    # family is a subset of the product; equality is a counting question
    return len(assignments) == expected


@dataclass(frozen=True)
class RectCheckRecord:
    test_vector: int  # index into the checked vectors
    time: int
    #: nested worst case precedes direct worst case (the rectangularity
    #: direction); None when a supremum failed to exist
    forward_holds: Optional[bool]
    #: direct precedes nested (must always hold)
    reverse_holds: Optional[bool]
    equality: Optional[bool]
    nested_root: Optional[Vec] = None
    direct_root: Optional[Vec] = None
    sup_failure: Optional[str] = None


@dataclass(frozen=True)
class RectReport:
    records: tuple[RectCheckRecord, ...]
    n_vectors: int
    seed: Optional[int] = None
    pointed: bool = False

    @property
    def rectangular_on_sample(self) -> bool:
        return all(r.forward_holds for r in self.records if r.sup_failure is None)

    @property
    def reverse_ok(self) -> bool:
        return all(r.reverse_holds for r in self.records if r.sup_failure is None)

    def summary(self) -> str:
        verdict = (
            "no counterexample found"
            if self.rectangular_on_sample
            else "counterexample found"
        )
        seed_part = f", seed={self.seed}" if self.seed is not None else ""
        return (
            f"{verdict} among {self.n_vectors} test vectors"
            f" ({len(self.records)} (vector, time) checks{seed_part})"
        )


def random_terminal_vectors(
    tree: ScenarioTree, dim: int, count: int, seed: int
) -> list[AdaptedVector]:
    """Terminal-time test vectors on a small rational grid
    (numerators -8..8, denominators 1, 2, 4)."""
    rng = random.Random(seed)
    leaves = tree.nodes_at(tree.horizon)
    out = []
    for _ in range(count):
        vals = {
            n: tuple(
                Fraction(rng.randint(-8, 8), rng.choice((1, 2, 4)))
                for _ in range(dim)
            )
            for n in leaves
        }
        out.append(AdaptedVector(tree.horizon, vals))
    return out


def check_preorder_rectangularity(
    cone: Cone,
    tree: ScenarioTree,
    family: ModelFamily,
    test_vectors: Iterable[AdaptedVector],
    seed: Optional[int] = None,
) -> RectReport:
    """Empirical rectangularity check on the supplied terminal vectors.

    For every vector X and every time t with t+1 < horizon, compares the
    nested worst case sup_m E_t[sup_m E_{t+1}[X]] against the direct
    worst case sup_m E_t[X].  The nested value always dominates the
    direct one; rectangularity additionally requires the converse, and
    for pointed cones equality.
    """
    vectors = list(test_vectors)
    records = []
    pointed = cone.is_pointed()
    for idx, x in enumerate(vectors):
        for t in range(tree.horizon - 1):
            inner = vsup_adapted(
                cone, [cond_expect(tree, m, x, t + 1) for m in family.models]
            )
            if inner.status == NOT_EXISTS:
                records.append(
                    RectCheckRecord(
                        idx, t, None, None, None,
                        sup_failure=f"inner supremum at t={t + 1}",
                    )
                )
                continue
            nested = vsup_adapted(
                cone,
                [cond_expect(tree, m, inner.value, t) for m in family.models],
            )
            direct = vsup_adapted(
                cone, [cond_expect(tree, m, x, t) for m in family.models]
            )
            if nested.status == NOT_EXISTS or direct.status == NOT_EXISTS:
                records.append(
                    RectCheckRecord(
                        idx, t, None, None, None,
                        sup_failure=f"outer supremum at t={t}",
                    )
                )
                continue
            fwd = leq_t(cone, nested.value, direct.value)
            rev = leq_t(cone, direct.value, nested.value)
            eq = (nested.value.values == direct.value.values) if pointed else None
            records.append(
                RectCheckRecord(
                    idx,
                    t,
                    fwd,
                    rev,
                    eq,
                    nested_root=nested.value.at(tree.root) if t == 0 else None,
                    direct_root=direct.value.at(tree.root) if t == 0 else None,
                )
            )
    return RectReport(
        records=tuple(records), n_vectors=len(vectors), seed=seed, pointed=pointed
    )
